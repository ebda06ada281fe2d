"""Hierarchical alternating least squares (Frobenius coordinate descent).

Used both as the least-squares baseline and to warm-start the L1 solvers:
a handful of HALS sweeps on random factors avoids the overly sparse basins
the L1 objective has on sparse data.
"""

from __future__ import annotations

import numpy as np

from .sparse_core import FactorPair, SparseNonnegMatrix, WL1Problem

__all__ = ["hals_sweep", "hals_init", "initial_factors"]


def _xht(x: SparseNonnegMatrix, h: np.ndarray) -> np.ndarray:
    """X @ H.T in O(nnz * r), via one bincount per component."""
    r = h.shape[0]
    colidx = x.column_indices()
    out = np.empty((x.nrows, r))
    for t in range(r):
        out[:, t] = np.bincount(
            x.rowidx, weights=x.values * h[t, colidx], minlength=x.nrows
        )
    return out


def _wtx(x: SparseNonnegMatrix, w: np.ndarray) -> np.ndarray:
    """W.T @ X in O(nnz * r)."""
    r = w.shape[1]
    colidx = x.column_indices()
    out = np.empty((r, x.ncols))
    for t in range(r):
        out[t, :] = np.bincount(
            colidx, weights=x.values * w[x.rowidx, t], minlength=x.ncols
        )
    return out


def hals_sweep(x: SparseNonnegMatrix, w, h, rng=None):
    """One full HALS sweep (all columns of W, then all rows of H).

    Each coordinate block is the exact nonnegative least-squares update
    ``W[:, i] <- max(0, W[:, i] + (X H' - W H H')[:, i] / (H H')[i, i])``
    and symmetrically for rows of H.  A coordinate whose Gram diagonal is
    zero is skipped; if ``rng`` is given, any factor column/row still zero
    at the end of the sweep is reseeded from Uniform(0, mean(X)) so the
    component can re-enter the fit.  The Frobenius objective never
    increases during the sweep proper.
    """
    w = np.array(w, dtype=np.float64)
    h = np.array(h, dtype=np.float64)
    m, n = x.shape
    r = w.shape[1]
    if w.shape != (m, r) or h.shape != (r, n):
        raise ValueError("factor dimensions do not match X")
    if np.any(w < 0) or np.any(h < 0):
        raise ValueError("factors must be nonnegative")

    hht = h @ h.T
    xht = _xht(x, h)
    for i in range(r):
        d = hht[i, i]
        if d <= 0:
            continue
        w[:, i] = np.maximum(0.0, w[:, i] + (xht[:, i] - w @ hht[:, i]) / d)

    wtw = w.T @ w
    wtx = _wtx(x, w)
    for i in range(r):
        d = wtw[i, i]
        if d <= 0:
            continue
        h[i, :] = np.maximum(0.0, h[i, :] + (wtx[i, :] - wtw[i, :] @ h) / d)

    if rng is not None:
        mean_val = float(x.values.sum()) / (m * n) if m * n else 0.0
        if mean_val > 0:
            for i in range(r):
                if not w[:, i].any():
                    w[:, i] = rng.uniform(0.0, mean_val, size=m)
                if not h[i, :].any():
                    h[i, :] = rng.uniform(0.0, mean_val, size=n)
    return w, h


def hals_init(problem: WL1Problem, sweeps: int) -> FactorPair:
    """Uniform(0,1) factors refined by ``sweeps`` HALS sweeps (seed-determined)."""
    if sweeps < 0:
        raise ValueError("sweeps must be nonnegative")
    rng = np.random.default_rng(problem.seed)
    m, n = problem.X.shape
    w = rng.random((m, problem.rank))
    h = rng.random((problem.rank, n))
    for _ in range(sweeps):
        w, h = hals_sweep(problem.X, w, h, rng=rng)
    return FactorPair(w, h)


def initial_factors(problem: WL1Problem):
    """Resolve the problem's init policy into a concrete (W, H) pair."""
    if problem.init == "explicit":
        return problem.init_factors.W.copy(), problem.init_factors.H.copy()
    if problem.init == "random":
        rng = np.random.default_rng(problem.seed)
        m, n = problem.X.shape
        return rng.random((m, problem.rank)), rng.random((problem.rank, n))
    pair = hals_init(problem, problem.init_sweeps)
    return pair.W, pair.H
