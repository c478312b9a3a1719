from .conventions import (
    BaseDhConvention,
    DhConventionFactory,
    ModifiedConvention,
    TraditionalConvention,
)
from .recursion import (
    HomogeneousTransform,
    LinkKinematics,
    dh_transform,
    forward_recursion,
    joint_axis,
)

__all__ = [
    "BaseDhConvention",
    "DhConventionFactory",
    "HomogeneousTransform",
    "LinkKinematics",
    "ModifiedConvention",
    "TraditionalConvention",
    "dh_transform",
    "forward_recursion",
    "joint_axis",
]
