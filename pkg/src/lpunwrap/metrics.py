"""Agreement metrics for unwrapped solutions."""

import math

import numpy as np

from .errors import DimensionMismatchError, UndefinedMetricError
from .grid import PhaseMap, wrap_array


def q_error(mu: np.ndarray, nu: np.ndarray) -> float:
    """Normalized disagreement ||mu - nu|| / (||mu|| + ||nu||) in [0, 1]:
    0 for perfect agreement, 1 for perfect disagreement."""
    mu = np.asarray(mu, dtype=np.float64).ravel()
    nu = np.asarray(nu, dtype=np.float64).ravel()
    if mu.shape != nu.shape:
        raise DimensionMismatchError(f"lengths differ: {mu.shape} vs {nu.shape}")
    nmu = float(np.linalg.norm(mu))
    nnu = float(np.linalg.norm(nu))
    if nmu == 0.0 and nnu == 0.0:
        raise UndefinedMetricError("q_error is undefined for two zero vectors")
    return float(np.linalg.norm(mu - nu)) / (nmu + nnu)


def q_error_mean_aligned(mu: np.ndarray, nu: np.ndarray) -> float:
    """q_error after removing the mean difference from nu (the unwrapped
    solution is only defined up to an additive constant)."""
    mu = np.asarray(mu, dtype=np.float64).ravel()
    nu = np.asarray(nu, dtype=np.float64).ravel()
    if mu.shape != nu.shape:
        raise DimensionMismatchError(f"lengths differ: {mu.shape} vs {nu.shape}")
    return q_error(mu, nu + float(np.mean(mu - nu)))


def congruence_error(phi: PhaseMap, psi: PhaseMap) -> float:
    """Worst-cell deviation of phi from psi modulo 2*pi, after the best global
    shift; near zero means the solution is congruent to the wrapped data."""
    if phi.values.shape != psi.values.shape:
        raise DimensionMismatchError(
            f"shapes differ: {phi.values.shape} vs {psi.values.shape}"
        )
    d = wrap_array(phi.values - psi.values)
    # circular mean gives a robust global shift; one linear refinement step
    # centers the residuals once they sit in a small arc
    shift = math.atan2(float(np.mean(np.sin(d))), float(np.mean(np.cos(d))))
    e = wrap_array(d - shift)
    e = wrap_array(e - float(np.mean(e)))
    return float(np.max(np.abs(e)))
