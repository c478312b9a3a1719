"""Results produced by training, prediction and evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from energy_model.models.parameters import (
    BackEmfForm,
    DynamicParameters,
    ParameterLayout,
    PowerParameters,
)
from energy_model.models.robot import RobotDescription


def _finite_or_none(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


@dataclass(frozen=True, eq=False)
class LeastSquaresReport:
    """Solution and diagnostics of one least-squares fit."""

    solution: np.ndarray
    residual_rms: float
    rank: int
    condition_estimate: float
    n_samples: int = 0
    n_params: int = 0

    @property
    def rank_deficient(self) -> bool:
        return self.rank < self.n_params

    @property
    def underdetermined(self) -> bool:
        return self.n_samples < self.n_params

    def to_dict(self) -> dict:
        """Diagnostics only; the solution is stored with the model parameters."""
        return {
            "residual_rms": float(self.residual_rms),
            "rank": int(self.rank),
            "condition_estimate": _finite_or_none(self.condition_estimate),
            "n_samples": int(self.n_samples),
            "n_params": int(self.n_params),
        }

    @classmethod
    def from_dict(cls, data: dict, solution=None) -> "LeastSquaresReport":
        condition = data["condition_estimate"]
        return cls(
            solution=np.asarray([] if solution is None else solution, dtype=float),
            residual_rms=float(data["residual_rms"]),
            rank=int(data["rank"]),
            condition_estimate=math.inf if condition is None else float(condition),
            n_samples=int(data["n_samples"]),
            n_params=int(data["n_params"]),
        )


@dataclass(frozen=True, eq=False)
class TrainingMeta:
    sample_count: int
    t_start: float
    t_end: float
    dynamic_reports: Tuple[LeastSquaresReport, ...]
    power_report: LeastSquaresReport

    @property
    def underdetermined(self) -> bool:
        return any(report.underdetermined for report in self.dynamic_reports) or self.power_report.underdetermined


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """Robot description plus identified dynamic and power parameters."""

    name: str
    robot: RobotDescription
    layout: ParameterLayout
    dynamic_params: DynamicParameters
    power_params: PowerParameters
    back_emf: BackEmfForm = BackEmfForm.SIGNED
    meta: Optional[TrainingMeta] = None

    @property
    def dof(self) -> int:
        return self.robot.dof


Number = Union[float, np.ndarray]


@dataclass(frozen=True, eq=False)
class PowerPrediction:
    """Total power and its components.

    For a single sample ``total`` and ``constant`` are floats and the per-joint
    components have shape ``(dof,)``; for a series they gain a leading sample
    axis.
    """

    total: Number
    raw_total: Number
    constant: Number
    inductive: np.ndarray
    resistive: np.ndarray
    back_emf: np.ndarray
    driver: np.ndarray
    clamped: Union[bool, np.ndarray] = False


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    """Headline evaluation metrics; power metrics are ``None`` when no power was measured."""

    sample_count: int
    power_rmse: Optional[float] = None
    power_rmse_pct: Optional[float] = None
    r_squared: Optional[float] = None
    dynamic_rmse: Optional[float] = None
    dynamic_rmse_pct: Optional[float] = None
    joint_rmse: np.ndarray = field(default_factory=lambda: np.zeros(0))
    joint_rmse_pct: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def headline(self) -> dict:
        return {
            "RMSE_D": self.dynamic_rmse,
            "%RMSE_D": self.dynamic_rmse_pct,
            "RMSE [W]": self.power_rmse,
            "RMSE%": self.power_rmse_pct,
            "r2": self.r_squared,
        }
