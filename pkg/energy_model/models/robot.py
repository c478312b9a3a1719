"""
Robot description types.

A ``RobotDescription`` carries everything the library needs to know about a
manipulator before any data is seen: its Denavit-Hartenberg chain and
convention, link masses and centers of mass, the payload at the tool, the kind
of joint sensor the robot reports (motor current or joint torque), the motor
torque constants and the gravity convention.

Rows of the DH chain flagged ``static`` describe articulations that never move
(their joint variable is frozen at ``theta_offset``). They stay in the
kinematic chain but are excluded from the actuated state, so ``dof`` counts
only the actuated rows.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from config import settings
from energy_model.exceptions import InvalidArgumentError


class DhConvention(enum.Enum):
    """Denavit-Hartenberg numbering convention."""

    TRADITIONAL = 0
    MODIFIED = 1

    @classmethod
    def parse(cls, value) -> "DhConvention":
        """Accept an enum member, its integer flag (0/1) or its name."""
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().upper()
            if key in cls.__members__:
                return cls[key]
            if key in ("NORMAL", "STANDARD"):
                return cls.TRADITIONAL
            if key in ("0", "1"):
                return cls(int(key))
        elif isinstance(value, (int, np.integer)) and not isinstance(value, bool):
            try:
                return cls(int(value))
            except ValueError:
                pass
        raise InvalidArgumentError(f"Unsupported DH convention: {value!r}")


class SensorKind(enum.Enum):
    """Quantity reported by the joint sensors."""

    CURRENT = "current"
    TORQUE = "torque"

    @classmethod
    def parse(cls, value) -> "SensorKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InvalidArgumentError(f"Unsupported sensor kind: {value!r}") from None


def _vector(values, length: int, name: str) -> np.ndarray:
    array = np.asarray(values, dtype=float).reshape(-1)
    if array.shape != (length,):
        raise InvalidArgumentError(f"{name} must have {length} entries, got {array.size}")
    if not np.all(np.isfinite(array)):
        raise InvalidArgumentError(f"{name} must be finite")
    return array


@dataclass(frozen=True)
class DhRow:
    """One row of a DH table. Lengths in m, angles in rad."""

    d: float
    a: float
    alpha: float
    theta_offset: float = 0.0
    static: bool = False

    def __post_init__(self):
        for name in ("d", "a", "alpha", "theta_offset"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidArgumentError(f"DH row field '{name}' must be finite, got {value}")
            object.__setattr__(self, name, float(value))
        object.__setattr__(self, "static", bool(self.static))

    def to_dict(self) -> dict:
        data = {"d": self.d, "a": self.a, "alpha": self.alpha}
        if self.theta_offset:
            data["theta_offset"] = self.theta_offset
        if self.static:
            data["static"] = True
        return data


@dataclass(frozen=True, eq=False)
class GravityConvention:
    """Acceleration applied at the base and added to every center-of-mass acceleration."""

    g_vector: np.ndarray = field(default_factory=lambda: np.array(settings.DEFAULT_GRAVITY))

    def __post_init__(self):
        vector = _vector(self.g_vector, 3, "gravity vector")
        if np.linalg.norm(vector) <= 0.0:
            raise InvalidArgumentError("gravity vector must have nonzero magnitude")
        object.__setattr__(self, "g_vector", vector)


@dataclass(frozen=True, eq=False)
class LinkMassProperties:
    """Mass (kg), link-local COM (m) and COM inertia in link axes (kg*m^2)."""

    mass: float
    com: np.ndarray
    inertia: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))

    def __post_init__(self):
        if not math.isfinite(self.mass) or self.mass < 0:
            raise InvalidArgumentError(f"link mass must be finite and non-negative, got {self.mass}")
        object.__setattr__(self, "com", _vector(self.com, 3, "center of mass"))
        inertia = np.asarray(self.inertia, dtype=float)
        if inertia.shape != (3, 3) or not np.all(np.isfinite(inertia)):
            raise InvalidArgumentError("inertia must be a finite 3x3 matrix")
        if not np.allclose(inertia, inertia.T, rtol=0.0, atol=1e-12):
            raise InvalidArgumentError("inertia must be symmetric")
        if np.linalg.eigvalsh(inertia).min() < -1e-12:
            raise InvalidArgumentError("inertia must be positive semidefinite")
        object.__setattr__(self, "inertia", inertia)


@dataclass(frozen=True, eq=False)
class PayloadWrench:
    """Payload at the tool: external force (N), moment (N*m) and point mass (kg)."""

    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    moment: np.ndarray = field(default_factory=lambda: np.zeros(3))
    mass: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "force", _vector(self.force, 3, "payload force"))
        object.__setattr__(self, "moment", _vector(self.moment, 3, "payload moment"))
        if not math.isfinite(self.mass):
            raise InvalidArgumentError("payload mass must be finite")
        object.__setattr__(self, "mass", float(self.mass))

    def to_dict(self) -> dict:
        return {
            "mass": self.mass,
            "force": self.force.tolist(),
            "moment": self.moment.tolist(),
        }


@dataclass(frozen=True, eq=False)
class FrictionParameters:
    """Viscous (N*m*s/rad) and Coulomb (N*m) constants per actuated joint."""

    k_v: np.ndarray
    k_s: np.ndarray

    def __post_init__(self):
        k_v = np.asarray(self.k_v, dtype=float).reshape(-1)
        object.__setattr__(self, "k_v", _vector(k_v, k_v.size, "viscous friction"))
        object.__setattr__(self, "k_s", _vector(self.k_s, k_v.size, "Coulomb friction"))

    @classmethod
    def zeros(cls, dof: int) -> "FrictionParameters":
        return cls(k_v=np.zeros(dof), k_s=np.zeros(dof))


@dataclass(frozen=True, eq=False)
class MotorConstants:
    """Motor torque constants k_m per actuated joint (N*m/A)."""

    k_m: np.ndarray

    def __post_init__(self):
        k_m = np.asarray(self.k_m, dtype=float).reshape(-1)
        k_m = _vector(k_m, k_m.size, "motor torque constants")
        if np.any(k_m <= 0):
            raise InvalidArgumentError("motor torque constants must be positive")
        object.__setattr__(self, "k_m", k_m)


@dataclass(frozen=True, eq=False)
class RobotDescription:
    """Static description of a serial manipulator with revolute joints."""

    name: str
    dh_rows: Sequence[DhRow]
    convention: DhConvention
    link_masses: np.ndarray
    link_coms: np.ndarray
    payload: PayloadWrench = field(default_factory=PayloadWrench)
    sensor_kind: SensorKind = SensorKind.CURRENT
    motor_constants: Optional[MotorConstants] = None
    gravity: GravityConvention = field(default_factory=GravityConvention)

    def __post_init__(self):
        rows = tuple(self.dh_rows)
        if not rows:
            raise InvalidArgumentError("robot needs at least one DH row")
        object.__setattr__(self, "dh_rows", rows)
        object.__setattr__(self, "convention", DhConvention.parse(self.convention))
        object.__setattr__(self, "sensor_kind", SensorKind.parse(self.sensor_kind))

        masses = np.asarray(self.link_masses, dtype=float).reshape(-1)
        if masses.size != len(rows):
            raise InvalidArgumentError(
                f"link_masses has {masses.size} entries for {len(rows)} DH rows"
            )
        if not np.all(np.isfinite(masses)) or np.any(masses < 0):
            raise InvalidArgumentError("link masses must be finite and non-negative")
        object.__setattr__(self, "link_masses", masses)

        coms = np.asarray(self.link_coms, dtype=float)
        if coms.shape != (len(rows), 3):
            raise InvalidArgumentError(
                f"link_coms must have shape ({len(rows)}, 3), got {coms.shape}"
            )
        if not np.all(np.isfinite(coms)):
            raise InvalidArgumentError("link centers of mass must be finite")
        object.__setattr__(self, "link_coms", coms)

        if self.dof == 0:
            raise InvalidArgumentError("robot has no actuated joints")
        if self.motor_constants is not None and self.motor_constants.k_m.size != self.dof:
            raise InvalidArgumentError(
                f"motor_constants has {self.motor_constants.k_m.size} entries for {self.dof} actuated joints"
            )

    @property
    def n_links(self) -> int:
        """Number of DH rows (links), static ones included."""
        return len(self.dh_rows)

    @property
    def actuated_rows(self) -> tuple:
        """Row indices of the actuated joints, in chain order."""
        return tuple(index for index, row in enumerate(self.dh_rows) if not row.static)

    @property
    def dof(self) -> int:
        return len(self.actuated_rows)

    @property
    def torque_constants(self) -> np.ndarray:
        if self.motor_constants is None:
            return np.full(self.dof, settings.DEFAULT_TORQUE_CONSTANT)
        return self.motor_constants.k_m

    def link_mass_properties(self, inertias=None) -> list:
        """Per-link ``LinkMassProperties``; ``inertias`` defaults to zero tensors."""
        if inertias is None:
            inertias = np.zeros((self.n_links, 3, 3))
        return [
            LinkMassProperties(mass=self.link_masses[i], com=self.link_coms[i], inertia=inertias[i])
            for i in range(self.n_links)
        ]

    def to_dict(self) -> dict:
        data = {
            "name": self.name,
            "convention": self.convention.name.lower(),
            "sensor_kind": self.sensor_kind.value,
            "dh": [row.to_dict() for row in self.dh_rows],
            "links": [
                {"mass": float(mass), "com": com.tolist()}
                for mass, com in zip(self.link_masses, self.link_coms)
            ],
            "payload": self.payload.to_dict(),
            "gravity": self.gravity.g_vector.tolist(),
        }
        if self.motor_constants is not None:
            data["motor_constants"] = self.motor_constants.k_m.tolist()
        return data
