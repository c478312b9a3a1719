"""Sinusoidal excitation trajectories and numerical differentiation."""

import logging

import numpy as np

from energy_model.exceptions import InvalidArgumentError
from energy_model.models.states import SinusoidSpec

logger = logging.getLogger(__name__)


def sample_times(spec: SinusoidSpec) -> np.ndarray:
    return np.arange(spec.n_samples) / spec.sample_rate


def generate_sinusoid(spec: SinusoidSpec):
    """
    theta_i(t) = theta0_i + A_i sin(2 pi f_i t + phi_i) with analytic derivatives.

    Returns:
        (q, dq, ddq, t): three (N, dof) arrays and the (N,) time vector
    """
    if spec.n_samples < 1:
        raise InvalidArgumentError(
            f"duration {spec.duration} s at {spec.sample_rate} Hz yields no samples"
        )
    t = sample_times(spec)
    omega = 2.0 * np.pi * spec.frequency
    angle = np.outer(t, omega) + spec.phase
    sin, cos = np.sin(angle), np.cos(angle)
    q = spec.theta0 + spec.amplitude * sin
    dq = spec.amplitude * omega * cos
    ddq = -spec.amplitude * omega ** 2 * sin
    logger.debug(f"generated {t.size} sinusoid samples for {spec.dof} joints")
    return q, dq, ddq, t


def differentiate(values, t) -> np.ndarray:
    """
    Time derivative by divided differences: central in the interior, one-sided
    at both ends. Works on non-uniform timestamps and along axis 0 of
    multi-channel arrays.
    """
    values = np.asarray(values, dtype=float)
    t = np.asarray(t, dtype=float).reshape(-1)
    if t.size < 2:
        raise InvalidArgumentError("at least two samples are needed to differentiate")
    if values.shape[0] != t.size:
        raise InvalidArgumentError(
            f"{values.shape[0]} values for {t.size} timestamps"
        )
    if np.any(np.diff(t) <= 0):
        raise InvalidArgumentError("timestamps must be strictly increasing")
    return np.gradient(values, t, axis=0, edge_order=1)
