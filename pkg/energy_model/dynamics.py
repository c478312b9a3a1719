"""
Backward Newton-Euler recursion, joint torques and motor currents.

Forces and moments are world-frame vectors. The moment of link ``i`` is taken
about the pivot of its joint, so the torque is the projection of that moment on
the joint axis. Moments are kept in two parts: ``n_k`` depends only on masses,
geometry and motion (plus the payload wrench), ``n_u`` only on the inertia
tensors. Both parts are linear in what they depend on, which is what makes the
model affine in the unknown parameters.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from energy_model.exceptions import InvalidArgumentError
from energy_model.kinematics.recursion import LinkKinematics, forward_recursion
from energy_model.models.parameters import INERTIA_INDEX, DynamicParameters, ParameterLayout
from energy_model.models.robot import (
    FrictionParameters,
    GravityConvention,
    MotorConstants,
    PayloadWrench,
    RobotDescription,
    SensorKind,
)
from energy_model.models.states import JointState

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WrenchChain:
    """Per-link force and split moment, shape ``(n_links, [N,] 3)``."""

    f: np.ndarray
    n_k: np.ndarray
    n_u: np.ndarray
    actuated_rows: Tuple[int, ...]

    @property
    def n(self) -> np.ndarray:
        return self.n_k + self.n_u


def backward_recursion(
    robot: RobotDescription,
    kin: Sequence[LinkKinematics],
    payload: Optional[PayloadWrench] = None,
    inertias=None,
    gravity: Optional[GravityConvention] = None,
) -> WrenchChain:
    """
    Propagate forces and moments from the tool back to the base.

    Args:
        robot: robot description (masses and COMs)
        kin: output of ``forward_recursion`` for the same robot
        payload: tool wrench and payload mass, defaults to the robot's payload
        inertias: per-link COM inertia tensors in link axes, shape (n_links, 3, 3)
        gravity: the convention used by the forward pass, defaults to the robot's

    Returns:
        WrenchChain with f, n_k and n_u for every link
    """
    if len(kin) != robot.n_links:
        raise InvalidArgumentError(
            f"got kinematics for {len(kin)} links, robot {robot.name} has {robot.n_links}"
        )
    payload = payload or robot.payload
    gravity = gravity or robot.gravity
    if inertias is None:
        inertias = np.zeros((robot.n_links, 3, 3))
    inertias = np.asarray(inertias, dtype=float)
    if inertias.shape != (robot.n_links, 3, 3):
        raise InvalidArgumentError(
            f"inertias must have shape ({robot.n_links}, 3, 3), got {inertias.shape}"
        )

    tip = kin[-1]
    # payload point mass sits at the last frame origin
    f_next = payload.force + payload.mass * (tip.pdd + gravity.g_vector)
    n_k_next = np.broadcast_to(payload.moment, f_next.shape)
    n_u_next = np.zeros_like(f_next)
    pivot_next = tip.T_world.translation

    f = [None] * robot.n_links
    n_k = [None] * robot.n_links
    n_u = [None] * robot.n_links
    for index in reversed(range(robot.n_links)):
        link = kin[index]
        inertial_force = robot.link_masses[index] * link.pdd_c
        f[index] = f_next + inertial_force
        n_k[index] = (
            n_k_next
            + np.cross(pivot_next - link.pivot, f_next)
            + np.cross(link.com - link.pivot, inertial_force)
        )
        rotation = link.T_world.rotation
        inertia_world = rotation @ inertias[index] @ np.swapaxes(rotation, -1, -2)
        Iw = np.einsum("...ij,...j->...i", inertia_world, link.w)
        Idw = np.einsum("...ij,...j->...i", inertia_world, link.dw)
        n_u[index] = n_u_next + Idw + np.cross(link.w, Iw)
        f_next, n_k_next, n_u_next, pivot_next = f[index], n_k[index], n_u[index], link.pivot

    return WrenchChain(
        f=np.stack(f), n_k=np.stack(n_k), n_u=np.stack(n_u), actuated_rows=robot.actuated_rows
    )


def joint_torques(
    chain: WrenchChain,
    kin: Sequence[LinkKinematics],
    friction: FrictionParameters,
    dq,
) -> np.ndarray:
    """tau_i = (n_k,i + n_u,i) . u_i + k_v,i * dq_i + k_s,i * sgn(dq_i), with sgn(0) = 0."""
    dq = np.asarray(dq, dtype=float)
    rows = list(chain.actuated_rows)
    if dq.shape[-1] != len(rows) or friction.k_v.size != len(rows):
        raise InvalidArgumentError(
            f"expected {len(rows)} joint velocities and friction constants"
        )
    axes = np.stack([kin[row].u for row in rows], axis=-2)
    moments = chain.n[rows]
    moments = np.moveaxis(moments, 0, -2)
    projected = np.einsum("...ij,...ij->...i", moments, axes)
    return projected + friction.k_v * dq + friction.k_s * np.sign(dq)


def joint_currents(torques, motors) -> np.ndarray:
    """i = tau / k_m."""
    k_m = motors.k_m if isinstance(motors, MotorConstants) else np.asarray(motors, dtype=float)
    if np.any(k_m <= 0):
        raise InvalidArgumentError("motor torque constants must be positive")
    return np.asarray(torques, dtype=float) / k_m


@lru_cache(maxsize=64)
def _descriptor_targets(names: Tuple[str, ...]):
    """Map each descriptor to (kind, index, component) once per layout."""
    targets = []
    for name in names:
        owner, component = name.split(".") if "." in name else (name, "")
        if owner.startswith("link"):
            targets.append(("inertia", int(owner[4:]) - 1, INERTIA_INDEX[component]))
        elif owner.startswith("joint"):
            targets.append((component, int(owner[5:]) - 1, None))
        elif owner == "payload":
            axis = "xyz".index(component[1])
            targets.append(("force" if component[0] == "f" else "moment", axis, None))
        else:
            raise InvalidArgumentError(f"Unknown parameter descriptor: {name}")
    return tuple(targets)


def unpack_unknowns(robot: RobotDescription, layout: ParameterLayout, vector):
    """Split a global unknown vector into inertia tensors, friction and payload wrench."""
    vector = np.asarray(vector, dtype=float).reshape(-1)
    if vector.size != layout.total_count:
        raise InvalidArgumentError(
            f"parameter vector has {vector.size} entries, layout expects {layout.total_count}"
        )
    inertias = np.zeros((robot.n_links, 3, 3))
    k_v = np.zeros(robot.dof)
    k_s = np.zeros(robot.dof)
    force = robot.payload.force.copy()
    moment = robot.payload.moment.copy()
    if layout.estimate_payload:
        force[:] = 0.0
        moment[:] = 0.0
    for value, (kind, index, component) in zip(vector, _descriptor_targets(layout.names)):
        if kind == "inertia":
            row, column = component
            inertias[index, row, column] = value
            inertias[index, column, row] = value
        elif kind == "k_v":
            k_v[index] = value
        elif kind == "k_s":
            k_s[index] = value
        elif kind == "force":
            force[index] = value
        else:
            moment[index] = value
    payload = PayloadWrench(force=force, moment=moment, mass=robot.payload.mass)
    return inertias, FrictionParameters(k_v=k_v, k_s=k_s), payload


def evaluate_unknowns(
    robot: RobotDescription,
    layout: ParameterLayout,
    vector,
    kin: Sequence[LinkKinematics],
    dq,
    gravity: Optional[GravityConvention] = None,
) -> np.ndarray:
    """Sensor-unit outputs of every actuated joint for one global unknown vector."""
    inertias, friction, payload = unpack_unknowns(robot, layout, vector)
    chain = backward_recursion(robot, kin, payload=payload, inertias=inertias, gravity=gravity)
    torques = joint_torques(chain, kin, friction, dq)
    if robot.sensor_kind is SensorKind.CURRENT:
        return joint_currents(torques, robot.torque_constants)
    return torques


def inverse_dynamics(
    robot: RobotDescription,
    params: DynamicParameters,
    state: JointState,
    gravity: Optional[GravityConvention] = None,
) -> np.ndarray:
    """
    Joint torques (torque sensors) or motor currents (current sensors).

    Joint ``i`` is evaluated with its own parameter vector K_i; the unknowns it
    does not own are zero for that evaluation.

    Returns:
        ndarray of shape (dof,) or (N, dof) following ``state``
    """
    if params.layout.dof != robot.dof:
        raise InvalidArgumentError(
            f"parameter layout has {params.layout.dof} joints, robot {robot.name} has {robot.dof}"
        )
    kin = forward_recursion(robot, state, gravity)
    outputs: List[np.ndarray] = []
    for joint in range(robot.dof):
        values = evaluate_unknowns(robot, params.layout, params.global_vector(joint), kin, state.dq, gravity)
        outputs.append(values[..., joint])
    return np.stack(outputs, axis=-1)
