"""Shared penalized-least-squares math: objectives, KKT residuals, lambda grids.

The canonical objective throughout the package is the unnormalized form

    f(beta) = ||y - X beta||_2^2 + lam2 ||beta||_2^2 + lam1 ||beta||_1

(lam2 = 0 gives the lasso, lam1 = 0 ridge). Modules that publish a
1/n-scaled penalty (the relaxed lasso) convert on their boundary, so a single
optimality certificate serves every solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

#: default grid length for regularization paths
GRID_COUNT = 100


@dataclass(frozen=True)
class PenaltySpec:
    """Tuning parameters identifying one fit.

    lambda1/lambda2 are the l1/l2 weights of the unnormalized objective.
    phi is the relaxation parameter and only meaningful for the relaxed
    lasso (phi=1 elsewhere); rescale_naive toggles the elastic net
    (1 + lambda2/n) output rescaling.
    """

    lambda1: float = 0.0
    lambda2: float = 0.0
    phi: float = 1.0
    rescale_naive: bool = False

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise DataError("penalty weights must be nonnegative")
        if not 0.0 <= self.phi <= 1.0:
            raise DataError(f"phi must lie in [0, 1], got {self.phi}")


@dataclass
class KktReport:
    """Stationarity certificate for a candidate solution."""

    max_violation: float
    per_coordinate: np.ndarray
    active_count: int


def soft_threshold(z: float, gamma: float) -> float:
    """sign(z) * max(|z| - gamma, 0). Total for gamma >= 0."""
    if gamma < 0:
        raise DataError("soft_threshold needs gamma >= 0")
    if z > gamma:
        return z - gamma
    if z < -gamma:
        return z + gamma
    return 0.0


def _check_dims(X, y, beta):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if X.ndim != 2:
        raise DataError("X must be a 2-d matrix")
    n, p = X.shape
    if y.shape != (n,):
        raise DataError(f"y has length {y.shape}, expected ({n},)")
    if beta.shape != (p,):
        raise DataError(f"beta has length {beta.shape}, expected ({p},)")
    return X, y, beta


def objective_value(X, y, beta, spec: PenaltySpec) -> float:
    """Unnormalized penalized RSS at beta."""
    X, y, beta = _check_dims(X, y, beta)
    r = y - X @ beta
    val = float(r @ r)
    if spec.lambda2:
        val += spec.lambda2 * float(beta @ beta)
    if spec.lambda1:
        val += spec.lambda1 * float(np.abs(beta).sum())
    return val


def kkt_violation(X, y, beta, spec: PenaltySpec) -> KktReport:
    """Subgradient stationarity residuals of the canonical objective.

    With g_j = 2 x_j'(y - X beta) - 2 lam2 beta_j, the residual is
    g_j - lam1 sign(beta_j) for active coordinates and
    max(|g_j| - lam1, 0) for inactive ones.
    """
    X, y, beta = _check_dims(X, y, beta)
    r = y - X @ beta
    g = 2.0 * (X.T @ r) - 2.0 * spec.lambda2 * beta
    nz = beta != 0.0
    per = np.maximum(np.abs(g) - spec.lambda1, 0.0)
    per[nz] = g[nz] - spec.lambda1 * np.sign(beta[nz])
    max_v = float(np.abs(per).max()) if per.size else 0.0
    return KktReport(max_violation=max_v, per_coordinate=per,
                     active_count=int(nz.sum()))


def lambda_max(X, y) -> float:
    """Smallest l1 weight at which the lasso solution is identically zero.

    Equals 2 max_j |x_j'y| for centered data; fitting the lasso at or above
    this value returns the all-zero coefficient vector.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] != y.shape[0]:
        raise DataError("X and y disagree on the number of rows")
    return 2.0 * float(np.abs(X.T @ y).max())


def lambda_grid(lam_max: float, count: int, ratio: float) -> np.ndarray:
    """Geometric grid from lam_max down to ratio*lam_max, strictly decreasing."""
    if lam_max <= 0:
        raise DataError("lambda_max must be positive to build a grid")
    if count < 2:
        raise DataError("grid needs at least 2 points")
    if not 0.0 < ratio < 1.0:
        raise DataError("ratio must lie in (0, 1)")
    return lam_max * np.power(ratio, np.linspace(0.0, 1.0, count))


def default_grid_ratio(n: int, p: int) -> float:
    """0.01 when p > n, else 1e-4 (the pathwise-solver convention)."""
    return 0.01 if p > n else 1e-4


def default_grid(X, y, count: int = GRID_COUNT) -> np.ndarray:
    """Standard descending l1 grid for the given (centered) data."""
    X = np.asarray(X, dtype=np.float64)
    n, p = X.shape
    return lambda_grid(lambda_max(X, y), count, default_grid_ratio(n, p))
