"""
Synthetic ground-truth data.

Joint trajectories come from a sinusoid spec, joint currents or torques from
the dynamic model evaluated with known parameters and total power from the
power model with known parameters (no clamp). Optional Gaussian noise is drawn
from a seeded generator so a given seed always yields the same dataset.
"""

import logging
from typing import Mapping, Optional

import numpy as np

from energy_model.datasets.trajectories import differentiate, generate_sinusoid
from energy_model.dynamics import inverse_dynamics
from energy_model.exceptions import InvalidArgumentError
from energy_model.models.parameters import (
    BackEmfForm,
    DynamicParameters,
    ParameterLayout,
    PowerParameters,
)
from energy_model.models.robot import RobotDescription
from energy_model.models.states import JointState, OperationalDataset, SinusoidSpec
from energy_model.power import predict_power

logger = logging.getLogger(__name__)

NOISE_CHANNELS = ("q", "dq", "ddq", "meas", "power")


def _link_inertia(mass: float, com: np.ndarray, rng) -> np.ndarray:
    """Slender rod through the frame origin and the COM, plus a small isotropic part."""
    length = 2.0 * np.linalg.norm(com)
    if length < 0.05:
        axis = np.array([1.0, 0.0, 0.0])
        length = 0.05
    else:
        axis = com / np.linalg.norm(com)
    rod = mass * length ** 2 / 12.0 * (np.eye(3) - np.outer(axis, axis))
    isotropic = 0.05 * mass * length ** 2 / 12.0 + 1e-4
    inertia = rod + isotropic * np.eye(3)
    return inertia * rng.uniform(0.8, 1.2)


def default_truth(robot: RobotDescription, layout: ParameterLayout, seed: int = 0):
    """
    Physically plausible ground-truth parameters for synthetic data.

    Inertias are positive definite, friction constants positive and the power
    constants of the order of a small collaborative arm.

    Returns:
        (DynamicParameters, PowerParameters)
    """
    if layout.dof != robot.dof:
        raise InvalidArgumentError(f"layout has {layout.dof} joints, robot {robot.name} has {robot.dof}")
    rng = np.random.default_rng(seed)
    inertias = np.zeros((robot.n_links, 3, 3))
    for index in range(robot.n_links):
        inertias[index] = _link_inertia(max(robot.link_masses[index], 0.1), robot.link_coms[index], rng)
    k_v = rng.uniform(0.5, 3.0, robot.dof)
    k_s = rng.uniform(0.2, 1.5, robot.dof)
    wrench = rng.uniform(-1.0, 1.0, 6)

    vector = np.zeros(layout.total_count)
    for position, name in enumerate(layout.names):
        owner, component = name.split(".")
        if owner.startswith("link"):
            row = int(owner[4:]) - 1
            matrix = inertias[row]
            vector[position] = {
                "Ixx": matrix[0, 0],
                "Iyy": matrix[1, 1],
                "Izz": matrix[2, 2],
                "Ixy": matrix[0, 1],
                "Ixz": matrix[0, 2],
                "Iyz": matrix[1, 2],
            }[component]
        elif owner.startswith("joint"):
            joint = int(owner[5:]) - 1
            vector[position] = k_v[joint] if component == "k_v" else k_s[joint]
        else:
            vector[position] = wrench["fx fy fz mx my mz".split().index(component)]

    power = PowerParameters.from_components(
        P_c=rng.uniform(30.0, 60.0),
        L=rng.uniform(0.001, 0.01, robot.dof),
        R=rng.uniform(0.2, 1.5, robot.dof),
        k_t=rng.uniform(0.05, 0.3, robot.dof),
        k_MD=rng.uniform(0.5, 2.0, robot.dof),
    )
    logger.info(f"default truth for {robot.name} drawn with seed {seed}")
    return DynamicParameters.from_global(layout, vector), power


def _noise_levels(noise: Optional[Mapping], channels: dict, noise_fraction: float) -> dict:
    levels = {}
    for name in noise or {}:
        if name not in NOISE_CHANNELS:
            raise InvalidArgumentError(f"cannot add noise to unknown channel '{name}'")
    for name in NOISE_CHANNELS:
        clean = channels[name]
        std = np.zeros(clean.shape[1:])
        if noise and name in noise:
            std = std + np.broadcast_to(np.asarray(noise[name], dtype=float), std.shape)
        if noise_fraction and name in ("meas", "power"):
            std = std + noise_fraction * np.sqrt(np.mean(clean ** 2, axis=0))
        if np.any(std < 0) or not np.all(np.isfinite(std)):
            raise InvalidArgumentError(f"noise level for '{name}' must be finite and non-negative")
        levels[name] = std
    return levels


def synth_generate(
    robot: RobotDescription,
    truth_dynamic: DynamicParameters,
    truth_power: PowerParameters,
    spec: SinusoidSpec,
    noise: Optional[Mapping] = None,
    seed: int = 0,
    noise_fraction: float = 0.0,
    back_emf=BackEmfForm.SIGNED,
) -> OperationalDataset:
    """
    Generate an operational dataset from known parameters.

    Args:
        noise: absolute Gaussian standard deviations keyed by channel
            (``q``, ``dq``, ``ddq``, ``meas``, ``power``); per-joint arrays allowed
        seed: seed of the noise generator
        noise_fraction: additional noise on ``meas`` and ``power`` as a
            fraction of each clean channel's RMS
        back_emf: back-EMF form of the generated power
    """
    if truth_dynamic.layout.dof != robot.dof:
        raise InvalidArgumentError(
            f"truth parameters cover {truth_dynamic.layout.dof} joints, robot {robot.name} has {robot.dof}"
        )
    if truth_power.dof != robot.dof:
        raise InvalidArgumentError(
            f"power truth covers {truth_power.dof} joints, robot {robot.name} has {robot.dof}"
        )
    if spec.dof != robot.dof:
        raise InvalidArgumentError(f"sinusoid spec has {spec.dof} joints, robot {robot.name} has {robot.dof}")
    if noise_fraction < 0:
        raise InvalidArgumentError(f"noise fraction must be non-negative, got {noise_fraction}")

    q, dq, ddq, t = generate_sinusoid(spec)
    meas = inverse_dynamics(robot, truth_dynamic, JointState(q=q, dq=dq, ddq=ddq))
    derivatives = differentiate(meas, t) if t.size >= 2 else np.zeros_like(meas)
    power = predict_power(
        truth_power,
        meas,
        derivatives,
        dq,
        robot.sensor_kind,
        robot.torque_constants,
        clamp=False,
        back_emf=back_emf,
    ).raw_total
    power = np.atleast_1d(np.asarray(power, dtype=float))

    channels = {"q": q, "dq": dq, "ddq": ddq, "meas": meas, "power": power}
    levels = _noise_levels(noise, channels, noise_fraction)
    rng = np.random.default_rng(seed)
    for name in NOISE_CHANNELS:
        if np.any(levels[name] > 0):
            channels[name] = channels[name] + rng.normal(size=channels[name].shape) * levels[name]

    logger.info(f"synthesised {t.size} samples for {robot.name} (seed {seed})")
    return OperationalDataset(t=t, **channels)
