from .files import (
    load_dataset,
    load_robot_description,
    load_sinusoid_spec,
    load_truth,
    write_dataset,
    write_robot_description,
    write_sinusoid_spec,
    write_truth,
)
from .trajectories import differentiate, generate_sinusoid

__all__ = [
    "differentiate",
    "generate_sinusoid",
    "load_dataset",
    "load_robot_description",
    "load_sinusoid_spec",
    "load_truth",
    "write_dataset",
    "write_robot_description",
    "write_sinusoid_spec",
    "write_truth",
]
