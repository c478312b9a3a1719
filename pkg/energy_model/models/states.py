"""Joint states, operational datasets and excitation specs."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from energy_model.exceptions import InvalidArgumentError, SchemaError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class JointState:
    """Joint positions (rad), velocities (rad/s) and accelerations (rad/s^2).

    Each array is either ``(dof,)`` for a single sample or ``(N, dof)`` for a
    batch of samples.
    """

    q: np.ndarray
    dq: np.ndarray
    ddq: np.ndarray

    def __post_init__(self):
        arrays = [np.asarray(value, dtype=float) for value in (self.q, self.dq, self.ddq)]
        shape = arrays[0].shape
        if arrays[0].ndim not in (1, 2):
            raise InvalidArgumentError(f"joint state arrays must be 1-D or 2-D, got shape {shape}")
        for name, array in zip(("q", "dq", "ddq"), arrays):
            if array.shape != shape:
                raise InvalidArgumentError(
                    f"joint state '{name}' has shape {array.shape}, expected {shape}"
                )
            if not np.all(np.isfinite(array)):
                raise InvalidArgumentError(f"joint state '{name}' must be finite")
        object.__setattr__(self, "q", arrays[0])
        object.__setattr__(self, "dq", arrays[1])
        object.__setattr__(self, "ddq", arrays[2])

    @classmethod
    def at_rest(cls, q) -> "JointState":
        q = np.asarray(q, dtype=float)
        return cls(q=q, dq=np.zeros_like(q), ddq=np.zeros_like(q))

    @property
    def is_batch(self) -> bool:
        return self.q.ndim == 2

    @property
    def dof(self) -> int:
        return self.q.shape[-1]

    @property
    def n_samples(self) -> int:
        return self.q.shape[0] if self.is_batch else 1

    def as_batch(self) -> "JointState":
        if self.is_batch:
            return self
        return JointState(q=self.q[None, :], dq=self.dq[None, :], ddq=self.ddq[None, :])


@dataclass(frozen=True, eq=False)
class OperationalDataset:
    """Time-stamped operational data of one robot.

    ``meas`` holds joint currents (A) or torques (N*m) depending on the robot's
    sensor kind; ``power`` holds total electrical power (W). Both are optional
    so the same type carries test data without measurements.
    """

    t: np.ndarray
    q: np.ndarray
    dq: np.ndarray
    ddq: np.ndarray
    meas: Optional[np.ndarray] = None
    power: Optional[np.ndarray] = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).reshape(-1)
        n = t.size
        _check_finite(t, "t")
        steps = np.diff(t)
        if np.any(steps <= 0):
            row = int(np.argmax(steps <= 0)) + 1
            raise SchemaError(
                f"timestamps must be strictly increasing (row {row}: {t[row]} after {t[row - 1]})",
                channel="t",
                row=row,
            )
        object.__setattr__(self, "t", t)

        width = None
        for name in ("q", "dq", "ddq", "meas"):
            value = getattr(self, name)
            if value is None:
                continue
            array = np.asarray(value, dtype=float)
            if array.ndim == 1 and n == 0:
                array = array.reshape(0, 0 if width is None else width)
            if array.ndim != 2 or array.shape[0] != n:
                raise SchemaError(
                    f"channel group '{name}' must have {n} rows, got shape {array.shape}",
                    channel=name,
                )
            if width is None:
                width = array.shape[1]
            elif array.shape[1] != width:
                raise SchemaError(
                    f"channel group '{name}' has {array.shape[1]} columns, expected {width}",
                    channel=name,
                )
            _check_finite(array, name)
            object.__setattr__(self, name, array)

        if self.power is not None:
            power = np.asarray(self.power, dtype=float).reshape(-1)
            if power.size != n:
                raise SchemaError(
                    f"channel 'power' must have {n} rows, got {power.size}", channel="power"
                )
            _check_finite(power, "power")
            object.__setattr__(self, "power", power)

    @property
    def n_samples(self) -> int:
        return self.t.size

    @property
    def dof(self) -> int:
        return self.q.shape[1]

    @property
    def state(self) -> JointState:
        return JointState(q=self.q, dq=self.dq, ddq=self.ddq)

    def require_dof(self, dof: int) -> None:
        """Raise ``SchemaError`` naming the first channel whose width differs from ``dof``."""
        for name in ("q", "dq", "ddq", "meas"):
            value = getattr(self, name)
            if value is not None and value.shape[1] != dof:
                raise SchemaError(
                    f"channel '{name}_*' has {value.shape[1]} columns but the robot has {dof} actuated joints",
                    channel=f"{name}_{min(value.shape[1], dof) + 1}",
                )

    def subset(self, rows) -> "OperationalDataset":
        def pick(array):
            return None if array is None else array[rows]

        return OperationalDataset(
            t=self.t[rows],
            q=self.q[rows],
            dq=self.dq[rows],
            ddq=self.ddq[rows],
            meas=pick(self.meas),
            power=pick(self.power),
        )

    def split(self, fraction: float):
        """Chronological split: the first ``fraction`` of samples and the rest."""
        if not 0.0 < fraction < 1.0:
            raise InvalidArgumentError(f"split fraction must lie in (0, 1), got {fraction}")
        cut = int(round(self.n_samples * fraction))
        return self.subset(slice(0, cut)), self.subset(slice(cut, None))


def _check_finite(array: np.ndarray, name: str) -> None:
    bad = ~np.isfinite(array)
    if np.any(bad):
        row = int(np.argwhere(bad)[0][0])
        raise SchemaError(f"channel '{name}' has a non-finite value at row {row}", channel=name, row=row)


@dataclass(frozen=True, eq=False)
class SinusoidSpec:
    """Per-joint sinusoidal excitation: theta = theta0 + A*sin(2*pi*f*t + phase)."""

    theta0: np.ndarray
    amplitude: np.ndarray
    frequency: np.ndarray
    phase: np.ndarray
    duration: float
    sample_rate: float

    def __post_init__(self):
        theta0 = np.asarray(self.theta0, dtype=float).reshape(-1)
        object.__setattr__(self, "theta0", theta0)
        for name in ("amplitude", "frequency", "phase"):
            array = np.asarray(getattr(self, name), dtype=float).reshape(-1)
            if array.shape != theta0.shape:
                raise InvalidArgumentError(
                    f"sinusoid '{name}' has {array.size} entries, expected {theta0.size}"
                )
            object.__setattr__(self, name, array)
        for name in ("theta0", "amplitude", "frequency", "phase"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise InvalidArgumentError(f"sinusoid '{name}' must be finite")
        if not self.duration > 0:
            raise InvalidArgumentError(f"duration must be positive, got {self.duration}")
        if not self.sample_rate > 0:
            raise InvalidArgumentError(f"sample_rate must be positive, got {self.sample_rate}")
        if theta0.size and self.sample_rate <= 2.0 * np.max(np.abs(self.frequency)):
            logger.warning(
                f"sample rate {self.sample_rate} Hz is not above twice the highest "
                f"excitation frequency {np.max(np.abs(self.frequency))} Hz"
            )

    @property
    def dof(self) -> int:
        return self.theta0.size

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))

    def to_dict(self) -> dict:
        return {
            "duration": float(self.duration),
            "sample_rate": float(self.sample_rate),
            "joints": [
                {
                    "theta0": float(theta0),
                    "amplitude": float(amplitude),
                    "frequency": float(frequency),
                    "phase": float(phase),
                }
                for theta0, amplitude, frequency, phase in zip(
                    self.theta0, self.amplitude, self.frequency, self.phase
                )
            ],
        }
