"""Cyclical coordinate descent for the elastic-net family, plus a closed-form
ridge solver.

``fit_at`` minimizes the canonical unnormalized objective (see ``penalty``)
for one (lambda1, lambda2) pair; ``fit_path`` runs warm-started fits down a
descending grid with the mixing weight alpha splitting each grid value into
lambda1 = alpha*lam and lambda2 = (1-alpha)*lam. Inputs are expected centered
(both X columns and y), which is what makes the intercept recoverable as the
training response mean at the reporting layer.

Coefficients in returned results are expressed in the coordinate system of
the X supplied; callers that scaled columns divide by the scales before
reporting (see ``selection.FittedModel``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import CollinearityError, ConvergenceError, DataError
from .penalty import PenaltySpec, kkt_violation

DEFAULT_TOL = 1e-8


def default_max_sweeps(p: int) -> int:
    # generous budget: degenerate p > n problems at the small end of a path
    # need thousands of (cheap) active-set sweeps to certify a 1e-8 KKT
    return 100 * p + 10_000


@dataclass
class FitResult:
    """One converged fit: coefficients, certificate, and its penalty."""

    beta: np.ndarray
    intercept: float
    active_set: np.ndarray
    iterations: int
    final_kkt: float
    spec: PenaltySpec

    def residuals(self, X, y) -> np.ndarray:
        """Diagnostic residual vector y - intercept - X beta."""
        return np.asarray(y, dtype=np.float64) - self.intercept - X @ self.beta


@dataclass
class PathPoint:
    lambda1: float
    lambda2: float
    beta: np.ndarray
    active_count: int


@dataclass
class CoefficientPath:
    """Warm-started fits down a strictly decreasing penalty grid."""

    points: list[PathPoint]
    alpha_mix: float

    def beta_matrix(self) -> np.ndarray:
        """(grid, p) stack of coefficient vectors."""
        return np.vstack([pt.beta for pt in self.points])

    def lambdas(self) -> np.ndarray:
        a = self.alpha_mix
        if a > 0:
            return np.array([pt.lambda1 / a for pt in self.points])
        return np.array([pt.lambda2 for pt in self.points])


def _prepare(X, y):
    X = np.asfortranarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise DataError("X must be (n, p) with y of length n")
    return X, y


def _kkt_max(X, y, beta, lam1, lam2) -> float:
    r = y - X @ beta
    g = 2.0 * (X.T @ r) - 2.0 * lam2 * beta
    nz = beta != 0.0
    viol = np.maximum(np.abs(g) - lam1, 0.0)
    viol[nz] = np.abs(g[nz] - lam1 * np.sign(beta[nz]))
    return float(viol.max()) if viol.size else 0.0


def _accel_candidate(X, y, beta, lam1, lam2, gram, xty):
    """Sign-fixed direct solve on the current support.

    At a stationary point with support A and signs s, the coefficients solve
    (X_A'X_A + lam2 I) b = X_A'y - (lam1/2) s. The candidate is only ever
    adopted by the caller after it passes the exact KKT check, so a wrong
    support or sign guess here is harmless.
    """
    if lam1 == 0.0:
        active = np.arange(X.shape[1])
    else:
        active = np.nonzero(beta)[0]
        if active.size == 0 or active.size > X.shape[0] + 10:
            return None
    if gram is not None:
        GA = gram[np.ix_(active, active)].copy()
        rhs = xty[active].copy()
    else:
        XA = X[:, active]
        GA = XA.T @ XA
        rhs = XA.T @ y
    if lam1 != 0.0:
        rhs -= 0.5 * lam1 * np.sign(beta[active])
    GA[np.diag_indices_from(GA)] += lam2
    try:
        c, low = scipy.linalg.cho_factor(GA)
        sol = scipy.linalg.cho_solve((c, low), rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.isfinite(sol).all():
        return None
    cand = np.zeros(X.shape[1])
    cand[active] = sol
    return cand


def fit_at(X, y, spec: PenaltySpec, beta0=None,
           tol: float = DEFAULT_TOL, max_sweeps: int | None = None,
           gram=None, xty=None) -> FitResult:
    """Solve one penalized problem to a KKT certificate of at most ``tol``.

    ``beta0`` warm-starts the sweeps. Between blocks of sweeps the solver
    attempts a direct solve on the support the sweeps have settled on and
    adopts it only when it passes the same exact-residual KKT check, which
    shortcuts the slow linear-rate tail on ill-conditioned active sets
    without ever weakening the certificate. ``gram``/``xty`` optionally
    carry precomputed X'X and X'y for those attempts.

    With ``spec.rescale_naive`` and lambda2 > 0 the returned coefficients
    carry the (1 + lambda2/n) factor; the KKT certificate refers to the
    inner (unscaled) minimizer.
    """
    if tol <= 0:
        raise DataError("tol must be positive")
    X, y = _prepare(X, y)
    n, p = X.shape
    if max_sweeps is None:
        max_sweeps = default_max_sweeps(p)
    col_sq = np.einsum("ij,ij->j", X, X)
    if spec.lambda1 == 0.0 and spec.lambda2 == 0.0:
        dead = np.nonzero(col_sq == 0.0)[0]
        if dead.size:
            raise CollinearityError(
                "zero-norm column(s) with no regularization make the problem singular",
                indices=dead,
            )

    beta = np.zeros(p) if beta0 is None else np.array(beta0, dtype=np.float64)
    if beta.shape != (p,):
        raise DataError("warm start has the wrong length")
    beta[col_sq == 0.0] = 0.0
    r = y - X @ beta if beta.any() else y.copy()

    lam1, lam2 = float(spec.lambda1), float(spec.lambda2)
    max_colsq = float(col_sq.max())
    total = 0
    chunk = 10
    converged = False
    kkt = np.inf
    while total < max_sweeps:
        budget = min(chunk, max_sweeps - total)
        sweeps, kkt, converged = _kernels.cd_fit(
            X, y, lam1, lam2, col_sq, max_colsq, beta, r, float(tol), int(budget),
        )
        total += int(sweeps)
        if converged:
            break
        cand = _accel_candidate(X, y, beta, lam1, lam2, gram, xty)
        if cand is not None:
            kkt_c = _kkt_max(X, y, cand, lam1, lam2)
            if kkt_c <= tol:
                beta = cand
                kkt = kkt_c
                converged = True
                break
        chunk = min(chunk * 2, 320)
    if not converged:
        raise ConvergenceError(
            f"coordinate descent did not reach tol={tol:g} in {max_sweeps} sweeps "
            f"(final KKT violation {kkt:.3e})",
            final_kkt=float(kkt),
        )
    if spec.rescale_naive and spec.lambda2 > 0.0:
        beta = (1.0 + spec.lambda2 / n) * beta
    return FitResult(
        beta=beta,
        intercept=0.0,
        active_set=np.nonzero(beta)[0],
        iterations=total,
        final_kkt=float(kkt),
        spec=spec,
    )


def fit_path(X, y, grid, alpha_mix: float, tol: float = DEFAULT_TOL,
             max_sweeps: int | None = None) -> CoefficientPath:
    """Warm-started fits at lambda1 = alpha*lam, lambda2 = (1-alpha)*lam."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise DataError("grid must be a nonempty 1-d vector")
    if grid.size > 1 and not (np.diff(grid) < 0).all():
        raise DataError("grid must be strictly decreasing")
    if not 0.0 <= alpha_mix <= 1.0:
        raise DataError("alpha_mix must lie in [0, 1]")
    X, y = _prepare(X, y)
    points: list[PathPoint] = []
    warm = None
    for gi, lam in enumerate(grid):
        spec = PenaltySpec(lambda1=alpha_mix * lam, lambda2=(1.0 - alpha_mix) * lam)
        try:
            fit = fit_at(X, y, spec, beta0=warm, tol=tol, max_sweeps=max_sweeps)
        except ConvergenceError as exc:
            raise ConvergenceError(
                f"path fit failed at grid index {gi} (lambda={lam:g}): {exc}",
                final_kkt=exc.final_kkt,
            ) from exc
        warm = fit.beta
        points.append(PathPoint(
            lambda1=spec.lambda1,
            lambda2=spec.lambda2,
            beta=fit.beta.copy(),
            active_count=int(fit.active_set.size),
        ))
    return CoefficientPath(points=points, alpha_mix=float(alpha_mix))


def ridge_closed_form(X, y, lambda2: float) -> FitResult:
    """Solve (X'X + lambda2 I) beta = X'y by SPD factorization.

    For p > n (and lambda2 > 0) the equivalent dual system
    beta = X'(XX' + lambda2 I)^{-1} y is factorized instead.
    """
    X, y = _prepare(X, y)
    n, p = X.shape
    if lambda2 < 0:
        raise DataError("lambda2 must be nonnegative")
    spec = PenaltySpec(lambda1=0.0, lambda2=float(lambda2))
    try:
        if lambda2 == 0.0 or p <= n:
            A = X.T @ X
            A[np.diag_indices_from(A)] += lambda2
            c, low = scipy.linalg.cho_factor(A)
            beta = scipy.linalg.cho_solve((c, low), X.T @ y)
        else:
            K = X @ X.T
            K[np.diag_indices_from(K)] += lambda2
            c, low = scipy.linalg.cho_factor(K)
            beta = X.T @ scipy.linalg.cho_solve((c, low), y)
    except np.linalg.LinAlgError as exc:
        raise CollinearityError(
            f"ridge system singular at lambda2={lambda2:g} (rank-deficient design)"
        ) from exc
    kkt = kkt_violation(X, y, beta, spec).max_violation
    return FitResult(
        beta=beta,
        intercept=0.0,
        active_set=np.nonzero(beta)[0],
        iterations=0,
        final_kkt=float(kkt),
        spec=spec,
    )


def ridge_path(X, y, grid) -> CoefficientPath:
    """Closed-form ridge fits for a whole grid from one SVD of X."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size == 0 or (grid <= 0).any():
        raise DataError("ridge grid values must be positive")
    if grid.size > 1 and not (np.diff(grid) < 0).all():
        raise DataError("grid must be strictly decreasing")
    X, y = _prepare(X, y)
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    uy = U.T @ y
    points = []
    for lam in grid:
        beta = Vt.T @ (s * uy / (s * s + lam))
        points.append(PathPoint(
            lambda1=0.0, lambda2=float(lam), beta=beta,
            active_count=int(np.count_nonzero(beta)),
        ))
    return CoefficientPath(points=points, alpha_mix=0.0)


def write_path(path: CoefficientPath, file, column_names) -> None:
    """Delimited export: lambda, alpha, then one coefficient column per predictor."""
    close = False
    if isinstance(file, (str, bytes)) or hasattr(file, "__fspath__"):
        file = open(file, "w", encoding="utf-8")
        close = True
    try:
        file.write("lambda,alpha," + ",".join(column_names) + "\n")
        lams = path.lambdas()
        for lam, pt in zip(lams, path.points):
            cells = [repr(float(lam)), repr(float(path.alpha_mix))]
            cells.extend(repr(float(b)) for b in pt.beta)
            file.write(",".join(cells) + "\n")
    finally:
        if close:
            file.close()
