"""
Affine (regressor) forms of the dynamic and power models.

The dynamic model is affine in its unknowns: inertia enters through
I*dw + w x I*w, friction through k_v*dq + k_s*sgn(dq) and the payload wrench
through the force/moment recursion. One model evaluation per unknown
(basis-vector probing) therefore yields each regressor column exactly, with the
all-zero evaluation as the known offset.
"""

from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np

from config import settings
from energy_model.dynamics import evaluate_unknowns
from energy_model.exceptions import InvalidArgumentError
from energy_model.kinematics.recursion import forward_recursion
from energy_model.models.parameters import (
    FRICTION_COMPONENTS,
    INERTIA_COMPONENTS,
    PAYLOAD_COMPONENTS,
    BackEmfForm,
    ParameterLayout,
    PowerRegressorRow,
    RegressorRow,
)
from energy_model.models.robot import GravityConvention, MotorConstants, RobotDescription
from energy_model.models.states import JointState
from energy_model.power import PowerBasisFactory

logger = logging.getLogger(__name__)


def build_layout(robot: RobotDescription, estimate_payload: bool = False) -> ParameterLayout:
    """
    Unknown-parameter layout of a robot.

    Global order: inertia components of every link from the first actuated
    joint's link to the tip, then k_v, k_s of every actuated joint, then the
    payload wrench when estimated. Links before the first actuated joint never
    move and carry no unknowns.
    """
    names: List[str] = []
    inertia_start = {}
    first_row = robot.actuated_rows[0]
    for row in range(first_row, robot.n_links):
        inertia_start[row] = len(names)
        names.extend(f"link{row + 1}.{component}" for component in INERTIA_COMPONENTS)
    friction_start = len(names)
    for joint in range(robot.dof):
        names.extend(f"joint{joint + 1}.{component}" for component in FRICTION_COMPONENTS)
    payload_start = len(names)
    if estimate_payload:
        names.extend(f"payload.{component}" for component in PAYLOAD_COMPONENTS)

    joint_columns = []
    for joint, row in enumerate(robot.actuated_rows):
        columns = []
        for link in range(row, robot.n_links):
            columns.extend(range(inertia_start[link], inertia_start[link] + len(INERTIA_COMPONENTS)))
        columns.extend([friction_start + 2 * joint, friction_start + 2 * joint + 1])
        if estimate_payload:
            columns.extend(range(payload_start, payload_start + len(PAYLOAD_COMPONENTS)))
        joint_columns.append(np.asarray(columns, dtype=int))

    layout = ParameterLayout(
        names=tuple(names), joint_columns=tuple(joint_columns), estimate_payload=estimate_payload
    )
    logger.info(
        f"layout for {robot.name}: {layout.total_count} unknowns, per joint "
        f"{[layout.joint_count(j) for j in range(layout.dof)]}"
    )
    return layout


def _probe_block(robot, layout, state: JointState, gravity):
    """Offsets (N, dof) and probe differences (P, N, dof) for one block of samples."""
    kin = forward_recursion(robot, state, gravity)
    zeros = np.zeros(layout.total_count)
    offsets = evaluate_unknowns(robot, layout, zeros, kin, state.dq, gravity)
    probes = np.empty((layout.total_count,) + offsets.shape)
    for column in range(layout.total_count):
        unit = zeros.copy()
        unit[column] = 1.0
        probes[column] = evaluate_unknowns(robot, layout, unit, kin, state.dq, gravity) - offsets
    return offsets, probes


def dynamic_design(
    robot: RobotDescription,
    state: JointState,
    layout: ParameterLayout,
    gravity: Optional[GravityConvention] = None,
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Known offsets and regressor matrices of every joint over a batch of samples.

    Samples are processed in blocks and written to preallocated rows, so the
    result does not depend on the block size.

    Returns:
        list over joints of (offset (N,), Theta_i (N, n_i))
    """
    if layout.dof != robot.dof:
        raise InvalidArgumentError(
            f"layout has {layout.dof} joints, robot {robot.name} has {robot.dof}"
        )
    batch = state.as_batch()
    n = batch.n_samples
    design = [(np.empty(n), np.empty((n, layout.joint_count(j)))) for j in range(robot.dof)]
    chunk = max(1, settings.REGRESSOR_CHUNK_SIZE)
    for start in range(0, n, chunk):
        rows = slice(start, min(start + chunk, n))
        block = JointState(q=batch.q[rows], dq=batch.dq[rows], ddq=batch.ddq[rows])
        offsets, probes = _probe_block(robot, layout, block, gravity)
        for joint, (offset, theta) in enumerate(design):
            offset[rows] = offsets[:, joint]
            theta[rows] = probes[layout.joint_columns[joint], :, joint].T
    return design


def dynamic_regressor_row(
    robot: RobotDescription,
    state: JointState,
    joint: int,
    layout: ParameterLayout,
    gravity: Optional[GravityConvention] = None,
) -> RegressorRow:
    """Regressor row of one joint (0-based index) at a single sample."""
    if not 0 <= joint < robot.dof:
        raise InvalidArgumentError(f"joint index {joint} out of range for {robot.dof} joints")
    if state.is_batch:
        raise InvalidArgumentError("dynamic_regressor_row takes a single sample")
    offset, theta = dynamic_design(robot, state, layout, gravity)[joint]
    return RegressorRow(known_offset=offset[0], coefficients=theta[0])


def power_design(
    meas,
    derivatives,
    dq,
    sensor_kind,
    motors: Optional[MotorConstants] = None,
    back_emf=BackEmfForm.SIGNED,
) -> np.ndarray:
    """Power regressor rows, shape (..., 1 + 4*dof), matching K_P ordering."""
    terms = PowerBasisFactory.create(sensor_kind, motors, back_emf).basis(meas, derivatives, dq)
    flat = terms.reshape(terms.shape[:-2] + (-1,))
    ones = np.ones(flat.shape[:-1] + (1,))
    return np.concatenate([ones, flat], axis=-1)


def power_regressor_row(
    currents_or_torques,
    derivatives,
    dq,
    sensor_kind,
    motors: Optional[MotorConstants] = None,
    back_emf=BackEmfForm.SIGNED,
) -> PowerRegressorRow:
    """[1, then per joint (i*di/dt, i^2, back-EMF basis, |i|)] for a single sample."""
    meas = np.asarray(currents_or_torques, dtype=float)
    if meas.ndim != 1:
        raise InvalidArgumentError("power_regressor_row takes a single sample")
    return PowerRegressorRow(power_design(meas, derivatives, dq, sensor_kind, motors, back_emf))
