"""
DH convention strategies.

Each convention knows how to build the homogeneous transform between
consecutive frames and where its joints sit along the chain. The rest of the
library asks ``DhConventionFactory`` for the strategy matching a robot's
``DhConvention`` instead of branching on the flag itself.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Dict, Type

import numpy as np

from energy_model.exceptions import InvalidArgumentError
from energy_model.models.robot import DhConvention, DhRow


class BaseDhConvention(ABC):
    """Abstract base class for DH conventions"""

    convention: DhConvention

    @abstractmethod
    def transform(self, row: DhRow, q):
        """
        Build ^{n-1}T_n for one DH row

        Args:
            row (DhRow): DH parameters of the row
            q (ndarray): joint variable(s) in rad, shape (N,); theta = q + theta_offset

        Returns:
            ndarray: transforms of shape (N, 4, 4)
        """
        pass

    @property
    @abstractmethod
    def joint_at_parent_origin(self) -> bool:
        """
        True when joint n rotates about the z-axis of frame n-1 (and sits at its
        origin); False when it rotates about the z-axis of its own frame n.
        """
        pass

    @staticmethod
    def _empty(q):
        q = np.asarray(q, dtype=float).reshape(-1)
        matrix = np.zeros((q.size, 4, 4))
        matrix[:, 3, 3] = 1.0
        return q, matrix


class TraditionalConvention(BaseDhConvention):
    """Rz(theta) * Tz(d) * Tx(a) * Rx(alpha)"""

    convention = DhConvention.TRADITIONAL

    def transform(self, row, q):
        q, T = self._empty(q)
        theta = q + row.theta_offset
        ct, st = np.cos(theta), np.sin(theta)
        ca, sa = np.cos(row.alpha), np.sin(row.alpha)
        T[:, 0, 0] = ct
        T[:, 0, 1] = -st * ca
        T[:, 0, 2] = st * sa
        T[:, 0, 3] = row.a * ct
        T[:, 1, 0] = st
        T[:, 1, 1] = ct * ca
        T[:, 1, 2] = -ct * sa
        T[:, 1, 3] = row.a * st
        T[:, 2, 1] = sa
        T[:, 2, 2] = ca
        T[:, 2, 3] = row.d
        return T

    @property
    def joint_at_parent_origin(self):
        return True


class ModifiedConvention(BaseDhConvention):
    """
    Rx(alpha_{n-1}) * Tx(a_{n-1}) * Rz(theta_n) with the translation column
    [a_{n-1}, -d_n sin(alpha_{n-1}), -d_n cos(alpha_{n-1})].

    A row's ``a`` and ``alpha`` hold a_{n-1} and alpha_{n-1}. The sign of the
    last translation entry differs from Craig's formulation (+d_n cos); the
    bundled modified-convention fixtures are written against this form.
    """

    convention = DhConvention.MODIFIED

    def transform(self, row, q):
        q, T = self._empty(q)
        theta = q + row.theta_offset
        ct, st = np.cos(theta), np.sin(theta)
        ca, sa = np.cos(row.alpha), np.sin(row.alpha)
        T[:, 0, 0] = ct
        T[:, 0, 1] = -st
        T[:, 0, 3] = row.a
        T[:, 1, 0] = st * ca
        T[:, 1, 1] = ct * ca
        T[:, 1, 2] = -sa
        T[:, 1, 3] = -row.d * sa
        T[:, 2, 0] = st * sa
        T[:, 2, 1] = ct * sa
        T[:, 2, 2] = ca
        T[:, 2, 3] = -row.d * ca
        return T

    @property
    def joint_at_parent_origin(self):
        return False


class DhConventionFactory:
    """Factory for DH convention strategies"""

    _mapping: Dict[DhConvention, Type[BaseDhConvention]] = {
        DhConvention.TRADITIONAL: TraditionalConvention,
        DhConvention.MODIFIED: ModifiedConvention,
    }

    @staticmethod
    def create(convention) -> BaseDhConvention:
        """
        Return the strategy for a convention

        Args:
            convention: DhConvention member, 0/1 flag or name

        Raises:
            InvalidArgumentError: if the convention is not supported
        """
        convention = DhConvention.parse(convention)
        strategy_cls = DhConventionFactory._mapping.get(convention)
        if not strategy_cls:
            raise InvalidArgumentError(f"Unsupported DH convention: {convention}")
        return strategy_cls()
