"""
Unknown-parameter bookkeeping.

The layout fixes which unknowns exist and in which order. Unknowns are
numbered once globally; each actuated joint owns an ordered subset of them:

* the six COM inertia components ``Ixx, Iyy, Izz, Ixy, Ixz, Iyz`` of its own
  link and of every link distal to it,
* its own viscous and Coulomb friction constants ``k_v`` and ``k_s``,
* optionally the six payload wrench components ``fx, fy, fz, mx, my, mz``.

For a six-joint robot without payload estimation joint ``i`` (1-based) owns
``6 * (7 - i) + 2`` unknowns: 38, 32, 26, 20, 14 and 8. The layout ordering is
part of the trained-model file format and must not change.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from energy_model.exceptions import InvalidArgumentError

INERTIA_COMPONENTS = ("Ixx", "Iyy", "Izz", "Ixy", "Ixz", "Iyz")
FRICTION_COMPONENTS = ("k_v", "k_s")
PAYLOAD_COMPONENTS = ("fx", "fy", "fz", "mx", "my", "mz")
POWER_COMPONENTS = ("L", "R", "k_t", "k_MD")

# (row, column) of each inertia component in the symmetric tensor
INERTIA_INDEX = {
    "Ixx": (0, 0),
    "Iyy": (1, 1),
    "Izz": (2, 2),
    "Ixy": (0, 1),
    "Ixz": (0, 2),
    "Iyz": (1, 2),
}


class BackEmfForm(enum.Enum):
    """Basis used for the back-EMF power term."""

    SIGNED = "signed"  # dq * i
    ABS = "abs"  # dq * |i|

    @classmethod
    def parse(cls, value) -> "BackEmfForm":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InvalidArgumentError(f"Unsupported back-EMF form: {value!r}") from None


@dataclass(frozen=True, eq=False)
class ParameterLayout:
    """Ordered unknown-parameter descriptors and the per-joint index map."""

    names: Tuple[str, ...]
    joint_columns: Tuple[np.ndarray, ...]
    estimate_payload: bool = False

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise InvalidArgumentError("parameter descriptors must be unique")
        columns = []
        for joint, indices in enumerate(self.joint_columns):
            indices = np.asarray(indices, dtype=int).reshape(-1)
            if indices.size and (indices.min() < 0 or indices.max() >= len(self.names)):
                raise InvalidArgumentError(f"joint {joint + 1} references an unknown parameter index")
            indices.setflags(write=False)
            columns.append(indices)
        object.__setattr__(self, "joint_columns", tuple(columns))

    @property
    def total_count(self) -> int:
        return len(self.names)

    @property
    def dof(self) -> int:
        return len(self.joint_columns)

    def joint_count(self, joint: int) -> int:
        return self.joint_columns[joint].size

    def joint_names(self, joint: int) -> Tuple[str, ...]:
        return tuple(self.names[index] for index in self.joint_columns[joint])

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InvalidArgumentError(f"Unknown parameter descriptor: {name}") from None

    def same_as(self, other: "ParameterLayout") -> bool:
        return (
            self.names == other.names
            and self.estimate_payload == other.estimate_payload
            and len(self.joint_columns) == len(other.joint_columns)
            and all(np.array_equal(a, b) for a, b in zip(self.joint_columns, other.joint_columns))
        )

    def to_dict(self) -> dict:
        return {
            "estimate_payload": self.estimate_payload,
            "global": list(self.names),
            "joints": [indices.tolist() for indices in self.joint_columns],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ParameterLayout":
        return cls(
            names=tuple(data["global"]),
            joint_columns=tuple(np.asarray(indices, dtype=int) for indices in data["joints"]),
            estimate_payload=bool(data["estimate_payload"]),
        )


@dataclass(frozen=True, eq=False)
class DynamicParameters:
    """One identified vector K_i per actuated joint, in layout order."""

    layout: ParameterLayout
    joint_vectors: Tuple[np.ndarray, ...]

    def __post_init__(self):
        vectors = tuple(np.asarray(vector, dtype=float).reshape(-1) for vector in self.joint_vectors)
        if len(vectors) != self.layout.dof:
            raise InvalidArgumentError(
                f"expected {self.layout.dof} joint parameter vectors, got {len(vectors)}"
            )
        for joint, vector in enumerate(vectors):
            if vector.size != self.layout.joint_count(joint):
                raise InvalidArgumentError(
                    f"joint {joint + 1} parameter vector has {vector.size} entries, "
                    f"layout expects {self.layout.joint_count(joint)}"
                )
        object.__setattr__(self, "joint_vectors", vectors)

    @classmethod
    def zeros(cls, layout: ParameterLayout) -> "DynamicParameters":
        return cls(layout, tuple(np.zeros(layout.joint_count(j)) for j in range(layout.dof)))

    @classmethod
    def from_global(cls, layout: ParameterLayout, vector) -> "DynamicParameters":
        """Gather per-joint vectors from one consistent global vector."""
        vector = np.asarray(vector, dtype=float).reshape(-1)
        if vector.size != layout.total_count:
            raise InvalidArgumentError(
                f"global parameter vector has {vector.size} entries, layout expects {layout.total_count}"
            )
        return cls(layout, tuple(vector[columns] for columns in layout.joint_columns))

    def global_vector(self, joint: int) -> np.ndarray:
        """Global-length vector holding joint ``joint``'s estimates, zeros elsewhere."""
        vector = np.zeros(self.layout.total_count)
        vector[self.layout.joint_columns[joint]] = self.joint_vectors[joint]
        return vector

    def to_global(self) -> np.ndarray:
        """
        Average of the per-joint estimates of each unknown (diagnostic).

        Averaged as deviations from the first estimate, so consistent vectors
        come back bit for bit.
        """
        reference = np.full(self.layout.total_count, np.nan)
        deviation = np.zeros(self.layout.total_count)
        counts = np.zeros(self.layout.total_count)
        for columns, vector in zip(self.layout.joint_columns, self.joint_vectors):
            unset = np.isnan(reference[columns])
            reference[columns[unset]] = vector[unset]
            deviation[columns] += vector - reference[columns]
            counts[columns] += 1
        reference = np.nan_to_num(reference, nan=0.0)
        return reference + np.divide(deviation, counts, out=np.zeros_like(deviation), where=counts > 0)


def power_parameter_names(dof: int) -> Tuple[str, ...]:
    names = ["P_c"]
    for joint in range(1, dof + 1):
        names.extend(f"joint{joint}.{component}" for component in POWER_COMPONENTS)
    return tuple(names)


@dataclass(frozen=True, eq=False)
class PowerParameters:
    """K_P = [P_c, then L, R, k_t, k_MD for every actuated joint]."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size < 5 or (values.size - 1) % 4:
            raise InvalidArgumentError(
                f"power parameter vector must have 1 + 4*dof entries, got {values.size}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_components(cls, P_c, L, R, k_t, k_MD) -> "PowerParameters":
        per_joint = np.column_stack([np.asarray(v, dtype=float).reshape(-1) for v in (L, R, k_t, k_MD)])
        return cls(np.concatenate([[float(P_c)], per_joint.reshape(-1)]))

    @property
    def dof(self) -> int:
        return (self.values.size - 1) // 4

    @property
    def names(self) -> Tuple[str, ...]:
        return power_parameter_names(self.dof)

    @property
    def P_c(self) -> float:
        return float(self.values[0])

    def _component(self, offset: int) -> np.ndarray:
        return self.values[1 + offset::4]

    @property
    def L(self) -> np.ndarray:
        return self._component(0)

    @property
    def R(self) -> np.ndarray:
        return self._component(1)

    @property
    def k_t(self) -> np.ndarray:
        return self._component(2)

    @property
    def k_MD(self) -> np.ndarray:
        return self._component(3)


@dataclass(frozen=True, eq=False)
class RegressorRow:
    """Affine form of one joint's model at one sample: offset + coefficients . K_i."""

    known_offset: float
    coefficients: np.ndarray

    def __post_init__(self):
        coefficients = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if not np.isfinite(self.known_offset) or not np.all(np.isfinite(coefficients)):
            raise InvalidArgumentError("regressor row must be finite")
        object.__setattr__(self, "known_offset", float(self.known_offset))
        object.__setattr__(self, "coefficients", coefficients)

    def evaluate(self, parameters: Sequence[float]) -> float:
        return self.known_offset + float(self.coefficients @ np.asarray(parameters, dtype=float))


@dataclass(frozen=True, eq=False)
class PowerRegressorRow:
    """Basis row [1, then per joint (i*di/dt, i^2, back-EMF basis, |i|)]."""

    coefficients: np.ndarray

    def __post_init__(self):
        coefficients = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if coefficients.size < 5 or (coefficients.size - 1) % 4 or coefficients[0] != 1.0:
            raise InvalidArgumentError("power regressor row must be [1, 4 entries per joint]")
        object.__setattr__(self, "coefficients", coefficients)

    def evaluate(self, parameters: PowerParameters) -> float:
        return float(self.coefficients @ parameters.values)
