"""Sparse coordinate descent for weighted-L1 nonnegative factorization.

Each scalar update solves the one-dimensional problem built from the
positive entries of one column of X, with every zero entry of that column
collapsed into a single weight-``c`` breakpoint at the origin.  A full
sweep therefore costs O(r * nnz * log nnz) instead of the O(r * m * n *
log(mn)) a dense coordinate pass needs, while producing the same iterates.

Column subproblems are independent, so the H-pass is organized as blocks
of columns laid out in a padded table (one row per column, weightless
sentinel entries as padding): a whole block of weighted medians then runs
as a handful of array operations.  Blocks have a fixed width, so results
are bit-identical whether blocks run sequentially or on a thread pool.
The W-pass is the same machinery applied to the transposed problem.

Within one column the running products v_j = (W H)_{kappa_j, j} are kept
incrementally: updating coordinate i shifts v_j by W_{kappa_j,i} * delta,
and v_j is rebuilt from scratch at the start of every pass, so rounding
drift cannot accumulate across sweeps.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from time import perf_counter

import numpy as np

from .hals import initial_factors
from .sparse_core import (
    FactorPair,
    SolveTrace,
    SparseNonnegMatrix,
    SweepRecord,
    WL1Problem,
    factor_sparsity,
    transpose,
)

__all__ = [
    "ColumnWorkspace",
    "update_h",
    "scd",
    "objective",
    "zero_update_predicate",
]

_BLOCK_COLS = 256


class _Block:
    __slots__ = ("j0", "j1", "xval", "rid", "validf", "v")

    def __init__(self, j0, j1, xval, rid, validf):
        self.j0 = j0
        self.j1 = j1
        self.xval = xval
        self.rid = rid
        self.validf = validf
        self.v = np.zeros_like(xval)


class ColumnWorkspace:
    """Padded per-column layout of the positive entries of a sparse matrix.

    Holds, per block of columns, the stored values, their row indices and a
    0/1 validity mask, plus the running products ``v`` of the active pass.
    Block boundaries depend only on the matrix, never on the thread count.
    """

    def __init__(self, x: SparseNonnegMatrix, block_cols: int = _BLOCK_COLS):
        self.x = x
        self.blocks = []
        counts = x.column_counts()
        for j0 in range(0, x.ncols, block_cols):
            j1 = min(x.ncols, j0 + block_cols)
            cnt = counts[j0:j1]
            width = int(cnt.max()) if cnt.size else 0
            offs = np.arange(width, dtype=np.int64)[None, :]
            starts = x.colptr[j0:j1][:, None]
            valid = offs < cnt[:, None]
            take = np.where(valid, starts + offs, 0)
            xval = np.where(valid, x.values[take], 0.0)
            rid = np.where(valid, x.rowidx[take], 0)
            self.blocks.append(_Block(j0, j1, xval, rid, valid.astype(np.float64)))

    def refresh_block_products(self, block: _Block, wslot, hslot):
        """Rebuild v = (W H) at the block's stored entries from scratch."""
        v = block.v
        v[:] = 0.0
        hblk = hslot[:, block.j0:block.j1]
        for t in range(wslot.shape[1]):
            v += wslot[block.rid, t] * hblk[t][:, None]
        v *= block.validf

    def flat_products(self) -> np.ndarray:
        """Current per-entry products, in stored-entry order."""
        parts = [b.v[b.validf > 0] for b in self.blocks]
        return np.concatenate(parts) if parts else np.zeros(0)

    def products_from_scratch(self, wslot, hslot) -> np.ndarray:
        """Independent recomputation of the per-entry products."""
        x = self.x
        colidx = x.column_indices()
        v = np.zeros(x.nnz)
        for t in range(wslot.shape[1]):
            v += wslot[x.rowidx, t] * hslot[t, colidx]
        return v


def _block_pass(block: _Block, wslot, hslot, lam, colsums_w):
    """Update every coordinate of ``hslot[:, j0:j1]`` in place.

    Coordinates are visited in ascending component order; within a fixed
    component all of the block's columns advance together, which is the
    same iterate sequence as visiting columns one by one because no state
    is shared between columns of one pass.  Returns the block's final L1
    residual on stored entries and the sum of its final products.
    """
    r = wslot.shape[1]
    v = block.v
    nb = block.xval.shape[0]
    zeros_col = np.zeros((nb, 1))
    for i in range(r):
        y = wslot[block.rid, i] * block.validf
        hrow = hslot[i, block.j0:block.j1]
        x = block.xval - v + y * hrow[:, None]
        colsum = y.sum(axis=1)
        c = lam * np.maximum(0.0, colsums_w[i] - colsum)
        ratio = np.full_like(x, np.inf)
        np.divide(x, y, out=ratio, where=y > 0.0)
        ratio = np.concatenate([ratio, zeros_col], axis=1)
        weight = np.concatenate([y, c[:, None]], axis=1)
        order = np.argsort(ratio, axis=1, kind="stable")
        ratio = np.take_along_axis(ratio, order, axis=1)
        cum = np.cumsum(np.take_along_axis(weight, order, axis=1), axis=1)
        total = cum[:, -1]
        sel = (cum >= 0.5 * total[:, None]).argmax(axis=1)
        alpha = np.maximum(0.0, np.take_along_axis(ratio, sel[:, None], axis=1)[:, 0])
        alpha = np.where(total > 0.0, alpha, hrow)
        v += y * (alpha - hrow)[:, None]
        hslot[i, block.j0:block.j1] = alpha
    return float(np.abs(block.xval - v).sum()), float(v.sum())


def _run_pass(ws: ColumnWorkspace, wslot, hslot, lam, threads=1):
    """One half-sweep over ``hslot``; returns the weighted objective."""
    colsums_w = wslot.sum(axis=0)

    def work(block):
        ws.refresh_block_products(block, wslot, hslot)
        return _block_pass(block, wslot, hslot, lam, colsums_w)

    if threads > 1 and len(ws.blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, ws.blocks))
    else:
        results = [work(block) for block in ws.blocks]
    data = sum(r[0] for r in results)
    possum = sum(r[1] for r in results)
    return float(data + lam * (float(colsums_w @ hslot.sum(axis=1)) - possum))


def _check_factors(x, w, h, lam):
    w = np.ascontiguousarray(w, dtype=np.float64)
    h = np.ascontiguousarray(h, dtype=np.float64)
    m, n = x.shape
    if w.ndim != 2 or h.ndim != 2 or w.shape[0] != m or h.shape[1] != n \
            or w.shape[1] != h.shape[0]:
        raise ValueError(
            f"factor dimensions {w.shape} x {h.shape} do not match X {x.shape}"
        )
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    if np.any(w < 0) or np.any(h < 0):
        raise ValueError("factor entries must be nonnegative")
    return w, h


def update_h(x: SparseNonnegMatrix, w, h, lam, threads: int = 1, workspace=None):
    """Replace every entry of H by its coordinate-wise optimum.

    Entry (i, j) is set to the nonnegative weighted median of the problem
    with numerators a = X_{k,j} - v_j + W_{k,i} H_{i,j} on the positive
    entries k of column j, weights W_{k,i}, and the grouped zero-entry term
    c = lam * (sum(W[:, i]) - sum over k of W_{k,i}).  An indeterminate
    subproblem (all weights zero) keeps its current value.

    Returns ``(H_new, objective)`` where the objective is the weighted-L1
    error of (X, W, H_new), assembled from the maintained products.
    """
    w, h = _check_factors(x, w, h, lam)
    h = h.copy()
    ws = workspace if workspace is not None else ColumnWorkspace(x)
    obj = _run_pass(ws, w, h, lam, threads)
    return h, obj


def objective(x: SparseNonnegMatrix, w, h, lam) -> float:
    """Weighted-L1 error in O(nnz * r), never forming (W H) on the zeros.

    Uses ``||W H||_1 = (e'W)(H e)`` (valid because the factors are
    nonnegative) to account for the zero entries:

        sum_{X>0} |X - WH|  +  lam * ( ||WH||_1 - sum_{X>0} (WH) ).
    """
    w, h = _check_factors(x, w, h, lam)
    colidx = x.column_indices()
    v = np.zeros(x.nnz)
    for t in range(w.shape[1]):
        v += w[x.rowidx, t] * h[t, colidx]
    data = float(np.abs(x.values - v).sum())
    return float(data + lam * (float(w.sum(axis=0) @ h.sum(axis=1)) - v.sum()))


def zero_update_predicate(x, w_col, c) -> bool:
    """Sufficient condition for the weighted-median update to return 0.

    With numerators ``x`` and weights ``w_col`` on the positive entries and
    grouped zero-entry weight ``c``, the update is exactly zero whenever
    the weight of the strictly negative breakpoints plus half of ``c``
    strictly exceeds half the weight of the positive-entry terms.
    """
    x = np.asarray(x, dtype=np.float64)
    w_col = np.asarray(w_col, dtype=np.float64)
    return bool(w_col[x < 0].sum() + 0.5 * c > 0.5 * w_col.sum())


def scd(problem: WL1Problem, threads: int = 1):
    """Alternating sparse coordinate descent (full W pass, then full H pass).

    The W pass runs the H-update machinery on the transposed problem.
    Stops when the relative-error decrease between consecutive sweeps falls
    below ``problem.tol``, or when the sweep or wall-clock budget is hit
    (the time budget is checked between sweeps, and warm-start sweeps do
    not count against it).  Returns the factors and the per-sweep trace;
    the traced objective never increases.
    """
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

    ws_h = ColumnWorkspace(x)
    ws_w = ColumnWorkspace(transpose(x))
    norm1 = float(x.values.sum())
    trace = SolveTrace(warmup_seconds=warmup)
    rel_prev = None
    start = perf_counter()
    for sweep in range(1, problem.max_sweeps + 1):
        wt = np.ascontiguousarray(w.T)
        ht = np.ascontiguousarray(h.T)
        _run_pass(ws_w, ht, wt, problem.lam, threads)
        w = np.ascontiguousarray(wt.T)
        obj = _run_pass(ws_h, w, h, problem.lam, threads)
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
