"""Naive dense coordinate descent for plain L1 factorization.

Reference implementation used as an exactness oracle for the sparse solver
and as the timing foil in the gain measurements: it visits every entry of
the residual, so its per-sweep cost does not depend on the sparsity of X.
Only the unweighted objective (lam = 1) is defined here.

Tie-breaking follows the same rule as the sparse path (first breakpoint
whose cumulative weight reaches half the total), so the two solvers
produce identical iterates whenever every scalar subproblem has a unique
minimizer.
"""

from __future__ import annotations

import warnings
from time import perf_counter

import numpy as np

from .hals import initial_factors
from .sparse_core import (
    FactorPair,
    SolveTrace,
    SweepRecord,
    WL1Problem,
    factor_sparsity,
)

__all__ = ["update_h_dense", "cd_dense"]


def update_h_dense(xdense, w, h):
    """Replace each H entry by the median of its full m-term subproblem.

    Column j, component i solves  min_{a>=0} sum_s |x_s - a W_{s,i}|  with
    x = X[:, j] - v + W[:, i] * H[i, j] over all m rows (v being the
    maintained column of W @ H).  No grouping of zero entries is done.
    """
    xdense = np.asarray(xdense, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    h = np.array(h, dtype=np.float64)
    m, n = xdense.shape
    r = w.shape[1]
    if w.shape != (m, r) or h.shape != (r, n):
        raise ValueError("factor dimensions do not match X")
    if np.any(xdense < 0) or np.any(w < 0) or np.any(h < 0):
        raise ValueError("inputs must be nonnegative")

    v_all = np.zeros_like(xdense)
    for t in range(r):
        v_all += np.outer(w[:, t], h[t, :])
    cols = [w[:, i] for i in range(r)]
    masks = [col > 0 for col in cols]
    pos_cols = [col[msk] for col, msk in zip(cols, masks)]

    for j in range(n):
        v = v_all[:, j]
        xj = xdense[:, j]
        for i in range(r):
            y = cols[i]
            yp = pos_cols[i]
            if yp.size == 0:
                continue  # indeterminate: keep the current value
            x = xj - v + y * h[i, j]
            ratios = x[masks[i]] / yp
            order = np.argsort(ratios, kind="stable")
            cum = np.cumsum(yp[order])
            k = int(np.searchsorted(cum, 0.5 * cum[-1], side="left"))
            alpha = max(0.0, float(ratios[order[k]]))
            v += y * (alpha - h[i, j])
            h[i, j] = alpha
    return h


def cd_dense(problem: WL1Problem):
    """Dense CD solve; the problem must have lam = 1.

    Same sweep order, initialization and stopping rules as the sparse
    solver, but the matrix is densified up front and the objective is
    re-evaluated as ``|X - W H|.sum()`` each sweep.  Single-threaded.
    """
    if problem.lam != 1.0:
        raise ValueError("dense CD is defined for the plain L1 objective (lam = 1)")
    x = problem.X
    m, n = x.shape
    r = problem.rank
    if x.nnz == 0:
        return FactorPair(np.zeros((m, r)), np.zeros((r, n))), SolveTrace()
    if r >= min(m, n):
        warnings.warn(
            f"rank {r} >= min{x.shape}: the factorization is not compressive",
            stacklevel=2,
        )

    t0 = perf_counter()
    w, h = initial_factors(problem)
    warmup = perf_counter() - t0

    xd = x.to_dense()
    norm1 = float(x.values.sum())
    trace = SolveTrace(warmup_seconds=warmup)
    rel_prev = None
    start = perf_counter()
    for sweep in range(1, problem.max_sweeps + 1):
        w = update_h_dense(xd.T, h.T, w.T).T
        h = update_h_dense(xd, w, h)
        obj = float(np.abs(xd - w @ h).sum())
        elapsed = perf_counter() - start
        trace.records.append(
            SweepRecord(sweep, obj, elapsed, factor_sparsity(w), factor_sparsity(h))
        )
        rel = obj / norm1
        if problem.tol is not None and rel_prev is not None \
                and abs(rel_prev - rel) < problem.tol:
            break
        rel_prev = rel
        if problem.time_limit is not None and elapsed >= problem.time_limit:
            break
    return FactorPair(w, h), trace
