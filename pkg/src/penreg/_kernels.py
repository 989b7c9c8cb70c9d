"""Hot inner loops: cyclical coordinate descent for the elastic-net family.

Two interchangeable implementations of the same contract live here:

* an explicit-loop kernel compiled with ``numba.njit`` (the default), and
* a vectorized pure-numpy fallback.

The live backend is picked at import time: numba whenever it is importable,
unless the environment variable ``PENREG_NUMBA`` is set to ``0``/``false``/
``off``. ``benchmarks/kernel_bench.py`` times both paths on the same inputs.

Kernel contract (``cd_fit``): minimize

    ||y - X beta||_2^2 + lam2 ||beta||_2^2 + lam1 ||beta||_1

by cyclical coordinate updates ``beta_j <- S(x_j' r_-j, lam1/2) / (x_j'x_j +
lam2)``. ``beta`` and the residual ``r = y - X beta`` are updated in place
(warm starts come in through them). Between full sweeps the kernel iterates
only the currently nonzero coordinates; the fit stops once a full sweep's
largest coefficient change times ``max_colsq`` falls below ``tol`` AND the
KKT stationarity residual, measured on an exactly recomputed residual, is at
most ``tol``. Returns ``(sweeps_done, kkt, converged)`` counting active-set
sweeps in the total.
"""

from __future__ import annotations

import os

import numpy as np


# ---------------------------------------------------------------------------
# vectorized numpy fallback
# ---------------------------------------------------------------------------

def _sweep_numpy(X, r, beta, col_sq, lam2, half_l1, idx):
    max_delta = 0.0
    for j in idx:
        cj = col_sq[j]
        denom = cj + lam2
        if denom <= 0.0:
            continue
        xj = X[:, j]
        bj = beta[j]
        rho = float(xj @ r) + cj * bj
        if rho > half_l1:
            bn = (rho - half_l1) / denom
        elif rho < -half_l1:
            bn = (rho + half_l1) / denom
        else:
            bn = 0.0
        d = bn - bj
        if d != 0.0:
            r -= d * xj
            beta[j] = bn
            ad = abs(d)
            if ad > max_delta:
                max_delta = ad
    return max_delta


def _kkt_max_numpy(X, r, beta, lam1, lam2):
    """Max absolute subgradient-stationarity residual (see penalty.kkt_violation)."""
    g = 2.0 * (X.T @ r) - 2.0 * lam2 * beta
    nz = beta != 0.0
    viol = np.maximum(np.abs(g) - lam1, 0.0)
    viol[nz] = np.abs(g[nz] - lam1 * np.sign(beta[nz]))
    return float(viol.max()) if viol.size else 0.0


def _cd_fit_numpy(X, y, lam1, lam2, col_sq, max_colsq, beta, r, tol, max_sweeps):
    n, p = X.shape
    half_l1 = 0.5 * lam1
    all_idx = np.arange(p)
    sweeps = 0
    while sweeps < max_sweeps:
        max_delta = _sweep_numpy(X, r, beta, col_sq, lam2, half_l1, all_idx)
        sweeps += 1
        if max_delta * max_colsq <= tol:
            r[:] = y - X @ beta
            kkt = _kkt_max_numpy(X, r, beta, lam1, lam2)
            if kkt <= tol or max_delta == 0.0:
                return sweeps, kkt, kkt <= tol
        active = np.nonzero(beta)[0]
        while sweeps < max_sweeps and active.size:
            md = _sweep_numpy(X, r, beta, col_sq, lam2, half_l1, active)
            sweeps += 1
            if md * max_colsq <= tol:
                break
    r[:] = y - X @ beta
    kkt = _kkt_max_numpy(X, r, beta, lam1, lam2)
    return sweeps, kkt, kkt <= tol


# ---------------------------------------------------------------------------
# explicit-loop source, compiled by numba when available
# ---------------------------------------------------------------------------
# X is expected Fortran-ordered so column walks are contiguous.

def _sweep_loops(X, r, beta, col_sq, lam2, half_l1, idx, n_idx):
    n = X.shape[0]
    max_delta = 0.0
    for t in range(n_idx):
        j = idx[t]
        cj = col_sq[j]
        denom = cj + lam2
        if denom <= 0.0:
            continue
        bj = beta[j]
        rho = cj * bj
        for i in range(n):
            rho += X[i, j] * r[i]
        if rho > half_l1:
            bn = (rho - half_l1) / denom
        elif rho < -half_l1:
            bn = (rho + half_l1) / denom
        else:
            bn = 0.0
        d = bn - bj
        if d != 0.0:
            for i in range(n):
                r[i] -= d * X[i, j]
            beta[j] = bn
            ad = abs(d)
            if ad > max_delta:
                max_delta = ad
    return max_delta


def _exact_residual_loops(X, y, beta, r):
    n, p = X.shape
    for i in range(n):
        r[i] = y[i]
    for j in range(p):
        bj = beta[j]
        if bj != 0.0:
            for i in range(n):
                r[i] -= X[i, j] * bj


def _kkt_max_loops(X, r, beta, lam1, lam2):
    n, p = X.shape
    worst = 0.0
    for j in range(p):
        g = 0.0
        for i in range(n):
            g += X[i, j] * r[i]
        g = 2.0 * g - 2.0 * lam2 * beta[j]
        if beta[j] > 0.0:
            v = abs(g - lam1)
        elif beta[j] < 0.0:
            v = abs(g + lam1)
        else:
            v = abs(g) - lam1
            if v < 0.0:
                v = 0.0
        if v > worst:
            worst = v
    return worst


def _cd_fit_driver(X, y, lam1, lam2, col_sq, max_colsq, beta, r, tol, max_sweeps):
    n, p = X.shape
    half_l1 = 0.5 * lam1
    all_idx = np.arange(p)
    active = np.empty(p, dtype=np.int64)
    sweeps = 0
    while sweeps < max_sweeps:
        max_delta = _sweep_loops(X, r, beta, col_sq, lam2, half_l1, all_idx, p)
        sweeps += 1
        if max_delta * max_colsq <= tol:
            _exact_residual_loops(X, y, beta, r)
            kkt = _kkt_max_loops(X, r, beta, lam1, lam2)
            if kkt <= tol or max_delta == 0.0:
                return sweeps, kkt, kkt <= tol
        na = 0
        for j in range(p):
            if beta[j] != 0.0:
                active[na] = j
                na += 1
        while sweeps < max_sweeps and na > 0:
            md = _sweep_loops(X, r, beta, col_sq, lam2, half_l1, active, na)
            sweeps += 1
            if md * max_colsq <= tol:
                break
    _exact_residual_loops(X, y, beta, r)
    kkt = _kkt_max_loops(X, r, beta, lam1, lam2)
    return sweeps, kkt, kkt <= tol


def _disabled_by_env() -> bool:
    return os.environ.get("PENREG_NUMBA", "").strip().lower() in (
        "0", "false", "off", "no",
    )


cd_fit_numba = None
if not _disabled_by_env():
    try:
        import numba

        _jit = numba.njit(cache=True, nogil=True)
        _sweep_loops = _jit(_sweep_loops)
        _exact_residual_loops = _jit(_exact_residual_loops)
        _kkt_max_loops = _jit(_kkt_max_loops)
        cd_fit_numba = _jit(_cd_fit_driver)
    except ImportError:
        cd_fit_numba = None

cd_fit = cd_fit_numba if cd_fit_numba is not None else _cd_fit_numpy
cd_fit_numpy = _cd_fit_numpy


def active_backend() -> str:
    """Name of the kernel path in use: 'numba' or 'numpy'."""
    return "numba" if cd_fit is cd_fit_numba and cd_fit_numba is not None else "numpy"
