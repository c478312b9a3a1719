"""Evaluation metrics, the model test pipeline and report exports."""

import logging
from typing import Mapping, Optional

import numpy as np
import pandas as pd

from config import settings
from energy_model.datasets.files import write_frame
from energy_model.dynamics import inverse_dynamics
from energy_model.exceptions import InvalidArgumentError, NumericalError
from energy_model.models.results import EvaluationReport, PowerPrediction, TrainedModel
from energy_model.models.states import JointState, OperationalDataset
from energy_model.power import predict_power, predict_power_series

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ("split", "RMSE_D", "%RMSE_D", "RMSE [W]", "RMSE%", "r2")


def _pair(real, est):
    real = np.asarray(real, dtype=float).reshape(-1)
    est = np.asarray(est, dtype=float).reshape(-1)
    if real.size == 0 or real.size != est.size:
        raise InvalidArgumentError(f"series must have equal nonzero lengths, got {real.size} and {est.size}")
    return real, est


def rmse(real, est) -> float:
    real, est = _pair(real, est)
    return float(np.sqrt(np.mean((real - est) ** 2)))


def rmse_pct(real, est) -> float:
    """RMSE as a percentage of the range of the real series."""
    real, est = _pair(real, est)
    span = real.max() - real.min()
    if span <= 0:
        raise NumericalError("RMSE% is undefined for a constant real series (zero range)")
    return rmse(real, est) / span * 100.0


def r_squared(real, est) -> float:
    """1 - SS_res / SS_tot; negative values are returned as they are."""
    real, est = _pair(real, est)
    total = np.sum((real - real.mean()) ** 2)
    if total <= 0:
        raise NumericalError("r2 is undefined for a real series with zero variance")
    return float(1.0 - np.sum((real - est) ** 2) / total)


def rmse_dynamic(real, est):
    """
    Pooled RMSE over all joints and samples, and the mean of per-joint RMSE%.

    Returns:
        (RMSE_D, %RMSE_D)
    """
    real = np.asarray(real, dtype=float)
    est = np.asarray(est, dtype=float)
    if real.ndim != 2 or real.shape != est.shape or real.size == 0:
        raise InvalidArgumentError(f"per-joint series must share a nonempty 2-D shape, got {real.shape} and {est.shape}")
    pooled = float(np.sqrt(np.mean((real - est) ** 2)))
    percentages = []
    for joint in range(real.shape[1]):
        try:
            percentages.append(rmse_pct(real[:, joint], est[:, joint]))
        except NumericalError as e:
            raise NumericalError(f"joint {joint + 1}: {e}") from e
    return pooled, float(np.mean(percentages))


def test_model(model: TrainedModel, dataset: OperationalDataset, clamp: bool = True):
    """
    Evaluate a trained model on a dataset.

    Dynamic metrics need ``meas_*`` channels and power metrics a ``power``
    channel; absent ones are reported as ``None``.

    Returns:
        (EvaluationReport, predicted power series, predicted meas series)
    """
    if dataset.n_samples == 0:
        raise InvalidArgumentError("cannot evaluate a model on an empty dataset")
    dataset.require_dof(model.dof)

    predicted_meas = inverse_dynamics(model.robot, model.dynamic_params, dataset.state)
    predicted_power, _ = predict_power_series(model, dataset, clamp=clamp)

    fields = {}
    if dataset.meas is not None:
        fields["dynamic_rmse"], fields["dynamic_rmse_pct"] = rmse_dynamic(dataset.meas, predicted_meas)
        fields["joint_rmse"] = np.sqrt(np.mean((dataset.meas - predicted_meas) ** 2, axis=0))
        fields["joint_rmse_pct"] = np.array(
            [rmse_pct(dataset.meas[:, j], predicted_meas[:, j]) for j in range(model.dof)]
        )
    if dataset.power is not None:
        fields["power_rmse"] = rmse(dataset.power, predicted_power)
        fields["power_rmse_pct"] = rmse_pct(dataset.power, predicted_power)
        fields["r_squared"] = r_squared(dataset.power, predicted_power)
    else:
        logger.warning(f"dataset has no power channel, power metrics of {model.name} are not available")
    report = EvaluationReport(sample_count=dataset.n_samples, **fields)
    logger.info(f"evaluated {model.name} on {dataset.n_samples} samples: {report.headline()}")
    return report, predicted_power, predicted_meas


def pc_model(model: TrainedModel, state: JointState, clamp: bool = True):
    """
    Power and currents (or torques) at a single state.

    A lone sample has no time derivative, so di/dt is taken as zero.

    Returns:
        (power in W, per-joint meas vector)
    """
    if state.is_batch or state.dof != model.dof:
        raise InvalidArgumentError(f"pc_model takes one state of {model.dof} joints, got shape {state.q.shape}")
    meas = inverse_dynamics(model.robot, model.dynamic_params, state)
    prediction = predict_power(
        model.power_params,
        meas,
        np.zeros_like(meas),
        state.dq,
        model.robot.sensor_kind,
        model.robot.torque_constants,
        clamp=clamp,
        back_emf=model.back_emf,
    )
    return prediction.total, meas


def report_frame(reports: Mapping[str, EvaluationReport]) -> pd.DataFrame:
    rows = [{"split": split, **report.headline()} for split, report in reports.items()]
    return pd.DataFrame(rows, columns=list(REPORT_COLUMNS))


def write_report(path, reports: Mapping[str, EvaluationReport]) -> None:
    """One row per split; absent metrics are written as NA."""
    frame = report_frame(reports)
    for column in REPORT_COLUMNS[1:]:
        frame[column] = [
            "NA" if pd.isna(value) else settings.CSV_FLOAT_FORMAT % value for value in frame[column]
        ]
    write_frame(path, frame)


def prediction_frame(
    t, prediction: PowerPrediction, measured_power: Optional[np.ndarray] = None
) -> pd.DataFrame:
    data = {"t": np.asarray(t, dtype=float), "P_pred": np.asarray(prediction.total, dtype=float)}
    if measured_power is not None:
        data["P_meas"] = measured_power
    data["P_c"] = np.asarray(prediction.constant, dtype=float)
    components = {
        "inductive": prediction.inductive,
        "resistive": prediction.resistive,
        "back_emf": prediction.back_emf,
        "driver": prediction.driver,
    }
    dof = np.asarray(prediction.inductive).shape[-1]
    for joint in range(dof):
        for name, values in components.items():
            data[f"{name}_{joint + 1}"] = values[:, joint]
    data["clamped"] = np.asarray(prediction.clamped, dtype=int)
    return pd.DataFrame(data)


def write_predictions(path, t, prediction: PowerPrediction, measured_power=None) -> None:
    write_frame(path, prediction_frame(t, prediction, measured_power))


def format_summary(value) -> str:
    """Human-readable number at the summary precision, ``NA`` when absent."""
    if value is None:
        return "NA"
    return f"{value:.{settings.SUMMARY_SIGNIFICANT_DIGITS}g}"
