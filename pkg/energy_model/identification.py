"""
Least-squares identification and the end-to-end training pipeline.

Every joint's vector K_i is fitted on its own: the targets are the measured
currents or torques minus the known offset of the full recursion, the design
matrix is that joint's regressor. The power vector K_P is fitted afterwards on
the measured total power. Fits use an SVD-based solver and return the
minimum-norm solution when the design is rank deficient.
"""

import logging
import math
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from config import settings
from energy_model.datasets.trajectories import differentiate
from energy_model.exceptions import InvalidArgumentError, SchemaError
from energy_model.models.parameters import (
    BackEmfForm,
    DynamicParameters,
    ParameterLayout,
    PowerParameters,
)
from energy_model.models.results import LeastSquaresReport, TrainedModel, TrainingMeta
from energy_model.models.robot import GravityConvention, RobotDescription
from energy_model.models.states import OperationalDataset
from energy_model.regressor import build_layout, dynamic_design, power_design
from energy_model.serializers import read_model, save_model

logger = logging.getLogger(__name__)


def fit_least_squares(design, targets, label: str = "fit") -> LeastSquaresReport:
    """
    Minimise ||design @ x - targets||.

    Args:
        design: (n_samples, n_params) matrix
        targets: (n_samples,) vector
        label: name used in diagnostics

    Returns:
        LeastSquaresReport with the solution, residual RMS, numerical rank and
        the ratio of extreme singular values (inf when singular)
    """
    design = np.asarray(design, dtype=float)
    targets = np.asarray(targets, dtype=float).reshape(-1)
    if design.ndim != 2:
        raise InvalidArgumentError(f"design matrix must be 2-D, got shape {design.shape}")
    n_samples, n_params = design.shape
    if n_samples < 1 or n_params < 1:
        raise InvalidArgumentError(f"cannot fit a {n_samples}x{n_params} system")
    if targets.size != n_samples:
        raise InvalidArgumentError(f"{targets.size} targets for {n_samples} design rows")
    if not np.all(np.isfinite(design)) or not np.all(np.isfinite(targets)):
        raise InvalidArgumentError(f"{label}: design and targets must be finite")
    if n_samples < n_params:
        logger.warning(f"{label}: {n_samples} samples for {n_params} unknowns, the fit is underdetermined")

    solution, _, rank, singular = scipy.linalg.lstsq(
        design, targets, cond=settings.LSTSQ_RCOND, lapack_driver="gelsd"
    )
    residual = targets - design @ solution
    smallest = singular.min() if singular.size else 0.0
    condition = float(singular.max() / smallest) if smallest > 0 else math.inf

    if rank < n_params:
        logger.warning(f"{label}: rank {rank} < {n_params} unknowns, returning the minimum-norm solution")
    if condition > settings.CONDITION_WARNING_THRESHOLD:
        logger.warning(f"{label}: condition estimate {condition:.3e} exceeds {settings.CONDITION_WARNING_THRESHOLD:.0e}")
    return LeastSquaresReport(
        solution=solution,
        residual_rms=float(np.sqrt(np.mean(residual ** 2))),
        rank=int(rank),
        condition_estimate=condition,
        n_samples=n_samples,
        n_params=n_params,
    )


def _require_meas(dataset: OperationalDataset, robot: RobotDescription) -> None:
    if dataset.meas is None:
        raise SchemaError(
            f"dataset has no meas_* channels ({robot.sensor_kind.value} measurements are required for training)",
            channel="meas_1",
        )


def train_dynamic_model(
    robot: RobotDescription,
    dataset: OperationalDataset,
    layout: ParameterLayout,
    gravity: Optional[GravityConvention] = None,
) -> Tuple[DynamicParameters, Tuple[LeastSquaresReport, ...]]:
    """Fit one K_i per actuated joint."""
    if dataset.n_samples == 0:
        raise InvalidArgumentError("cannot train on an empty dataset")
    _require_meas(dataset, robot)
    dataset.require_dof(robot.dof)

    design = dynamic_design(robot, dataset.state, layout, gravity)
    reports = []
    for joint, (offset, theta) in enumerate(design):
        report = fit_least_squares(theta, dataset.meas[:, joint] - offset, label=f"joint {joint + 1}")
        logger.info(
            f"joint {joint + 1}: {report.n_params} unknowns, rank {report.rank}, "
            f"residual rms {report.residual_rms:.3e}"
        )
        reports.append(report)
    params = DynamicParameters(layout, tuple(report.solution for report in reports))
    return params, tuple(reports)


def train_power_model(
    robot: RobotDescription,
    dataset: OperationalDataset,
    back_emf=BackEmfForm.SIGNED,
) -> Tuple[PowerParameters, LeastSquaresReport]:
    """Fit K_P on measured total power; current derivatives come from the timestamps."""
    if dataset.n_samples < 2:
        raise InvalidArgumentError("power training needs at least two samples to differentiate currents")
    if dataset.power is None:
        raise SchemaError("dataset has no 'power' channel, the power model cannot be trained", channel="power")
    _require_meas(dataset, robot)
    dataset.require_dof(robot.dof)

    derivatives = differentiate(dataset.meas, dataset.t)
    design = power_design(
        dataset.meas, derivatives, dataset.dq, robot.sensor_kind, robot.torque_constants, back_emf
    )
    report = fit_least_squares(design, dataset.power, label="power")
    logger.info(f"power: rank {report.rank}, residual rms {report.residual_rms:.3e} W")
    return PowerParameters(report.solution), report


def model_path(name: str, model_dir=None) -> Path:
    return Path(model_dir if model_dir is not None else settings.MODEL_DIR) / f"{name}.json"


def gen_train_model(
    robot: RobotDescription,
    dataset: OperationalDataset,
    name: str,
    estimate_payload: bool = False,
    back_emf=BackEmfForm.SIGNED,
    model_dir=None,
    path=None,
) -> TrainedModel:
    """
    Build the layout, fit every joint and the power model, then persist.

    The model is written to ``path`` when given, otherwise to
    ``<model_dir>/<name>.json`` with ``settings.MODEL_DIR`` as default store.
    """
    if not name or any(sep in name for sep in ("/", "\\")):
        raise InvalidArgumentError(f"invalid model name {name!r}")
    back_emf = BackEmfForm.parse(back_emf)
    dataset.require_dof(robot.dof)

    layout = build_layout(robot, estimate_payload)
    dynamic_params, dynamic_reports = train_dynamic_model(robot, dataset, layout)
    power_params, power_report = train_power_model(robot, dataset, back_emf)
    meta = TrainingMeta(
        sample_count=dataset.n_samples,
        t_start=float(dataset.t[0]),
        t_end=float(dataset.t[-1]),
        dynamic_reports=dynamic_reports,
        power_report=power_report,
    )
    if meta.underdetermined:
        logger.warning(f"model {name} is underdetermined: fewer samples than unknowns")
    model = TrainedModel(
        name=name,
        robot=robot,
        layout=layout,
        dynamic_params=dynamic_params,
        power_params=power_params,
        back_emf=back_emf,
        meta=meta,
    )
    save_model(model, path if path is not None else model_path(name, model_dir))
    return model


def load_model(name_or_path, model_dir=None) -> TrainedModel:
    """Read a model from a file path, or by name from the model store."""
    candidate = Path(name_or_path)
    if candidate.is_file():
        return read_model(candidate)
    stored = model_path(str(name_or_path), model_dir)
    if stored.is_file():
        return read_model(stored)
    raise FileNotFoundError(f"no model file {candidate} and no stored model {stored}")
