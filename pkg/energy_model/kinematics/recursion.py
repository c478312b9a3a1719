"""
Homogeneous transforms and the forward Newton-Euler recursion.

All recursion quantities are kept in the base (world) frame. Link ``i`` is
rigidly attached to DH frame ``i`` in both conventions; what differs is where
its joint sits (see ``BaseDhConvention.joint_at_parent_origin``).

Every routine accepts either a single sample or a batch with a leading sample
axis; batched results keep that axis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from config import settings
from energy_model.exceptions import InvalidArgumentError
from energy_model.kinematics.conventions import DhConventionFactory
from energy_model.models.robot import DhRow, GravityConvention, RobotDescription
from energy_model.models.states import JointState

logger = logging.getLogger(__name__)

Z_AXIS = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True, eq=False)
class HomogeneousTransform:
    """Rotation (3x3) and translation (m); arrays may carry a leading sample axis."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rotation = np.asarray(self.rotation, dtype=float)
        translation = np.asarray(self.translation, dtype=float)
        if rotation.shape[-2:] != (3, 3) or translation.shape[-1:] != (3,):
            raise InvalidArgumentError("transform needs a 3x3 rotation and a 3-vector translation")
        if rotation.shape[:-2] != translation.shape[:-1]:
            raise InvalidArgumentError("rotation and translation batch shapes differ")
        gram = np.einsum("...ij,...kj->...ik", rotation, rotation)
        if not np.allclose(gram, np.eye(3), rtol=0.0, atol=settings.ROTATION_TOLERANCE):
            raise InvalidArgumentError("rotation block is not orthonormal")
        if not np.allclose(np.linalg.det(rotation), 1.0, rtol=0.0, atol=settings.ROTATION_TOLERANCE):
            raise InvalidArgumentError("rotation block has determinant different from 1")
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> "HomogeneousTransform":
        return cls(rotation=np.eye(3), translation=np.zeros(3))

    @classmethod
    def from_matrix(cls, matrix) -> "HomogeneousTransform":
        matrix = np.asarray(matrix, dtype=float)
        return cls(rotation=matrix[..., :3, :3], translation=matrix[..., :3, 3])

    @property
    def matrix(self) -> np.ndarray:
        shape = self.rotation.shape[:-2] + (4, 4)
        matrix = np.zeros(shape)
        matrix[..., :3, :3] = self.rotation
        matrix[..., :3, 3] = self.translation
        matrix[..., 3, 3] = 1.0
        return matrix

    def __matmul__(self, other: "HomogeneousTransform") -> "HomogeneousTransform":
        rotation = self.rotation @ other.rotation
        translation = np.einsum("...ij,...j->...i", self.rotation, other.translation) + self.translation
        return HomogeneousTransform(rotation=rotation, translation=translation)


@dataclass(frozen=True, eq=False)
class LinkKinematics:
    """
    World-frame kinematic state of one link.

    ``r_link`` runs from the origin of the previous DH frame to this link's
    frame origin and ``r_com`` from this link's frame origin to its center of
    mass. ``pivot`` and ``com`` are the world positions of the joint driving
    the link and of its center of mass; the backward recursion takes moments
    about the pivots. ``pdd_c`` includes the gravity convention's base
    acceleration, ``pdd`` does not.
    """

    w: np.ndarray
    dw: np.ndarray
    pdd: np.ndarray
    pdd_c: np.ndarray
    u: np.ndarray
    r_link: np.ndarray
    r_com: np.ndarray
    T_world: HomogeneousTransform
    pivot: np.ndarray
    com: np.ndarray


def dh_transform(row: DhRow, q: float, convention) -> HomogeneousTransform:
    """Transform ^{n-1}T_n of one DH row at joint angle ``q`` (rad)."""
    if not np.isfinite(q):
        raise InvalidArgumentError(f"joint angle must be finite, got {q}")
    strategy = DhConventionFactory.create(convention)
    return HomogeneousTransform.from_matrix(strategy.transform(row, q)[0])


def joint_axis(world_rotation) -> np.ndarray:
    """u = R z_0: third column of the world rotation."""
    world_rotation = np.asarray(world_rotation, dtype=float)
    if world_rotation.shape[-2:] != (3, 3):
        raise InvalidArgumentError(f"joint axis needs a 3x3 rotation, got shape {world_rotation.shape}")
    gram = np.einsum("...ij,...kj->...ik", world_rotation, world_rotation)
    if not np.allclose(gram, np.eye(3), rtol=0.0, atol=settings.ROTATION_TOLERANCE):
        raise InvalidArgumentError("joint axis rotation is not orthonormal")
    return world_rotation @ Z_AXIS


def chain_joint_values(robot: RobotDescription, values: np.ndarray) -> np.ndarray:
    """Expand ``(N, dof)`` actuated values to ``(N, n_links)`` with zeros at static rows."""
    full = np.zeros((values.shape[0], robot.n_links))
    full[:, list(robot.actuated_rows)] = values
    return full


def forward_recursion(
    robot: RobotDescription,
    state: JointState,
    gravity: Optional[GravityConvention] = None,
) -> List[LinkKinematics]:
    """
    Propagate velocities and accelerations from the base to the tip.

    Args:
        robot: robot description
        state: single or batched joint state of the actuated joints
        gravity: base acceleration convention, defaults to the robot's

    Returns:
        one ``LinkKinematics`` per DH row (static rows included)
    """
    if state.dof != robot.dof:
        raise InvalidArgumentError(
            f"joint state has {state.dof} joints, robot {robot.name} has {robot.dof}"
        )
    gravity = gravity or robot.gravity
    strategy = DhConventionFactory.create(robot.convention)
    batch = state.as_batch()
    q = chain_joint_values(robot, batch.q)
    dq = chain_joint_values(robot, batch.dq)
    ddq = chain_joint_values(robot, batch.ddq)
    n = q.shape[0]

    T_prev = np.broadcast_to(np.eye(4), (n, 4, 4))
    w_prev = np.zeros((n, 3))
    dw_prev = np.zeros((n, 3))
    pdd_prev = np.zeros((n, 3))

    links = []
    for index, row in enumerate(robot.dh_rows):
        T = T_prev @ strategy.transform(row, q[:, index])
        axis_frame = T_prev if strategy.joint_at_parent_origin else T
        u = joint_axis(axis_frame[:, :3, :3])
        qd = dq[:, index, None]
        qdd = ddq[:, index, None]

        w = w_prev + qd * u
        dw = dw_prev + qdd * u + qd * np.cross(w_prev, u)

        r_link = T[:, :3, 3] - T_prev[:, :3, 3]
        # the link vector is fixed in whichever body carries both frame origins
        w_r, dw_r = (w, dw) if strategy.joint_at_parent_origin else (w_prev, dw_prev)
        pdd = pdd_prev + np.cross(dw_r, r_link) + np.cross(w_r, np.cross(w_r, r_link))

        r_com = T[:, :3, :3] @ robot.link_coms[index]
        pdd_c = pdd + np.cross(dw, r_com) + np.cross(w, np.cross(w, r_com)) + gravity.g_vector

        links.append(
            LinkKinematics(
                w=w,
                dw=dw,
                pdd=pdd,
                pdd_c=pdd_c,
                u=u,
                r_link=r_link,
                r_com=r_com,
                T_world=HomogeneousTransform.from_matrix(T),
                pivot=axis_frame[:, :3, 3],
                com=T[:, :3, 3] + r_com,
            )
        )
        T_prev, w_prev, dw_prev, pdd_prev = T, w, dw, pdd

    if not state.is_batch:
        links = [_squeeze(link) for link in links]
    return links


def _squeeze(link: LinkKinematics) -> LinkKinematics:
    return LinkKinematics(
        w=link.w[0],
        dw=link.dw[0],
        pdd=link.pdd[0],
        pdd_c=link.pdd_c[0],
        u=link.u[0],
        r_link=link.r_link[0],
        r_com=link.r_com[0],
        T_world=HomogeneousTransform(rotation=link.T_world.rotation[0], translation=link.T_world.translation[0]),
        pivot=link.pivot[0],
        com=link.com[0],
    )
