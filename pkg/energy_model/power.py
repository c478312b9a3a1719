"""
Electrical power model.

Total power is a constant term P_c (electronics plus brakes) and, per joint,
an inductive, a resistive, a back-EMF and a driver term. Robots with current
sensors use the current form; robots with torque sensors use the torque form,
where the 1/k_m factors are folded into the basis. When k_m is not known the
default of 1 makes the identified L, R, k_t and k_MD composite coefficients
(L/k_m^2, R/k_m^2, k_t/k_m, k_MD/k_m).

Regenerative braking cannot return energy, so predicted power is clamped at
zero after summation. The clamp is never applied while identifying.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import Dict, Optional, Type

import numpy as np

from energy_model.datasets.trajectories import differentiate
from energy_model.dynamics import inverse_dynamics
from energy_model.exceptions import InvalidArgumentError, SchemaError
from energy_model.models.parameters import BackEmfForm, PowerParameters
from energy_model.models.results import PowerPrediction, TrainedModel
from energy_model.models.robot import MotorConstants, SensorKind
from energy_model.models.states import OperationalDataset

logger = logging.getLogger(__name__)


class BasePowerBasis(ABC):
    """Abstract base class for sensor-dependent power bases"""

    sensor_kind: SensorKind

    def __init__(self, back_emf: BackEmfForm = BackEmfForm.SIGNED):
        self.back_emf = BackEmfForm.parse(back_emf)

    @abstractmethod
    def currents(self, meas):
        """
        Convert sensor readings to the quantity the basis is built on

        Args:
            meas (ndarray): joint currents or torques, shape (..., dof)

        Returns:
            ndarray: motor currents (or current-equivalent torques)
        """
        pass

    def basis(self, meas, dmeas, dq) -> np.ndarray:
        """
        Per-joint basis terms (i*di/dt, i^2, back-EMF, |i|)

        Args:
            meas (ndarray): joint currents or torques, shape (..., dof)
            dmeas (ndarray): their time derivatives
            dq (ndarray): joint velocities

        Returns:
            ndarray: shape (..., dof, 4)
        """
        meas, dmeas, dq = (np.asarray(v, dtype=float) for v in (meas, dmeas, dq))
        if not meas.shape == dmeas.shape == dq.shape:
            raise InvalidArgumentError(
                f"power inputs have inconsistent shapes {meas.shape}, {dmeas.shape}, {dq.shape}"
            )
        i = self.currents(meas)
        di = self.currents(dmeas)
        emf_base = i if self.back_emf is BackEmfForm.SIGNED else np.abs(i)
        return np.stack([i * di, i * i, dq * emf_base, np.abs(i)], axis=-1)


class CurrentPowerBasis(BasePowerBasis):
    """Current sensors: readings are motor currents."""

    sensor_kind = SensorKind.CURRENT

    def currents(self, meas):
        return meas


class TorquePowerBasis(BasePowerBasis):
    """Torque sensors: i = tau / k_m."""

    sensor_kind = SensorKind.TORQUE

    def __init__(self, k_m, back_emf: BackEmfForm = BackEmfForm.SIGNED):
        super().__init__(back_emf)
        self.k_m = np.asarray(k_m, dtype=float)

    def currents(self, meas):
        if meas.shape[-1:] != self.k_m.shape:
            raise InvalidArgumentError(
                f"{meas.shape[-1]} torque channels for {self.k_m.size} motor constants"
            )
        return meas / self.k_m


class PowerBasisFactory:
    """Factory for power bases"""

    _mapping: Dict[SensorKind, Type[BasePowerBasis]] = {
        SensorKind.CURRENT: CurrentPowerBasis,
        SensorKind.TORQUE: TorquePowerBasis,
    }

    @staticmethod
    def create(sensor_kind, motors: Optional[MotorConstants] = None, back_emf=BackEmfForm.SIGNED) -> BasePowerBasis:
        """
        Create the basis for a sensor kind

        Args:
            sensor_kind: SensorKind member or name
            motors: motor constants, required for torque sensors
            back_emf: back-EMF basis form

        Raises:
            InvalidArgumentError: unsupported sensor kind or missing k_m for torque sensors
        """
        sensor_kind = SensorKind.parse(sensor_kind)
        basis_cls = PowerBasisFactory._mapping.get(sensor_kind)
        if not basis_cls:
            raise InvalidArgumentError(f"Unsupported sensor kind: {sensor_kind}")
        if basis_cls is TorquePowerBasis:
            if motors is None:
                raise InvalidArgumentError("torque-sensor power model needs motor torque constants")
            k_m = motors.k_m if isinstance(motors, MotorConstants) else MotorConstants(k_m=motors).k_m
            return TorquePowerBasis(k_m, back_emf)
        return basis_cls(back_emf)


def predict_power(
    params: PowerParameters,
    currents_or_torques,
    derivatives,
    dq,
    sensor_kind,
    motors: Optional[MotorConstants] = None,
    clamp: bool = True,
    back_emf=BackEmfForm.SIGNED,
) -> PowerPrediction:
    """
    Evaluate the power model for one sample or a batch of samples.

    The clamp sets negative totals to zero and records where it did so.
    """
    meas = np.asarray(currents_or_torques, dtype=float)
    if meas.shape[-1] != params.dof:
        raise InvalidArgumentError(
            f"{meas.shape[-1]} joint channels for a {params.dof}-joint power model"
        )
    terms = PowerBasisFactory.create(sensor_kind, motors, back_emf).basis(meas, derivatives, dq)
    inductive = params.L * terms[..., 0]
    resistive = params.R * terms[..., 1]
    back_emf_power = params.k_t * terms[..., 2]
    driver = params.k_MD * terms[..., 3]
    raw_total = params.P_c + (inductive + resistive + back_emf_power + driver).sum(axis=-1)
    clamped = np.logical_and(clamp, raw_total < 0)
    total = np.where(clamped, 0.0, raw_total)
    constant = np.full_like(raw_total, params.P_c)
    if meas.ndim == 1:
        total, raw_total, constant, clamped = float(total), float(raw_total), float(constant), bool(clamped)
    return PowerPrediction(
        total=total,
        raw_total=raw_total,
        constant=constant,
        inductive=inductive,
        resistive=resistive,
        back_emf=back_emf_power,
        driver=driver,
        clamped=clamped,
    )


def measurement_derivatives(meas: np.ndarray, t: np.ndarray) -> np.ndarray:
    """d(meas)/dt per joint; zero when fewer than two samples exist."""
    if t.size < 2:
        return np.zeros_like(meas)
    return differentiate(meas, t)


def predict_power_series(model: TrainedModel, dataset: OperationalDataset, clamp: bool = True):
    """
    Power time series of a trained model over a dataset.

    Dataset currents/torques are used when present; otherwise they are
    predicted by the identified dynamic model.

    Returns:
        (total power array, PowerPrediction with per-sample breakdown)
    """
    if dataset.n_samples and dataset.dof != model.dof:
        raise SchemaError(
            f"dataset has {dataset.dof} joints, model {model.name} has {model.dof}",
            channel="q",
        )
    if dataset.meas is not None:
        meas = dataset.meas
    elif dataset.n_samples:
        meas = inverse_dynamics(model.robot, model.dynamic_params, dataset.state)
    else:
        meas = np.zeros((0, model.dof))
    if dataset.n_samples == 0:
        dq = np.zeros((0, model.dof))
    else:
        dq = dataset.dq
    prediction = predict_power(
        model.power_params,
        meas,
        measurement_derivatives(meas, dataset.t),
        dq,
        model.robot.sensor_kind,
        model.robot.torque_constants,
        clamp=clamp,
        back_emf=model.back_emf,
    )
    return np.asarray(prediction.total), prediction
