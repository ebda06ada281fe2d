"""Core matrix and problem types shared by all solvers.

The solvers operate on a compressed-sparse-column (CSC) view of a
nonnegative matrix in which zeros are structural: an exactly-zero value is
never stored.  The per-sweep cost guarantees rest on that rule, so
ingestion is strict about it: entries at or below the drop tolerance are
removed, everything stored is strictly positive.

Dense factors are plain ``numpy.ndarray`` objects (float64); the sparse
type and the problem/trace containers below are the only custom types.
"""

from __future__ import annotations

import dataclasses
from typing import NamedTuple, Optional

import numpy as np

__all__ = [
    "SparseNonnegMatrix",
    "FactorPair",
    "WL1Problem",
    "SweepRecord",
    "SolveTrace",
    "from_dense",
    "from_coo",
    "transpose",
    "factor_sparsity",
]


class SparseNonnegMatrix:
    """Sparse nonnegative matrix, compressed by columns.

    Attributes
    ----------
    nrows, ncols : int
        Matrix dimensions.
    colptr : (ncols+1,) int64 array
        Nondecreasing column starts; ``colptr[-1] == nnz``.
    rowidx : (nnz,) int64 array
        Row index of each stored entry, strictly increasing within a column.
    values : (nnz,) float64 array
        Stored values, all strictly positive.
    """

    __slots__ = ("nrows", "ncols", "colptr", "rowidx", "values")

    def __init__(self, nrows, ncols, colptr, rowidx, values):
        colptr = np.ascontiguousarray(colptr, dtype=np.int64)
        rowidx = np.ascontiguousarray(rowidx, dtype=np.int64)
        values = np.ascontiguousarray(values, dtype=np.float64)
        if nrows < 0 or ncols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if colptr.shape != (ncols + 1,):
            raise ValueError(f"colptr must have length ncols+1={ncols + 1}")
        if colptr[0] != 0 or np.any(np.diff(colptr) < 0):
            raise ValueError("column starts must be nondecreasing and begin at 0")
        nnz = int(colptr[-1])
        if rowidx.shape != (nnz,) or values.shape != (nnz,):
            raise ValueError("rowidx/values length must equal colptr[-1]")
        if nnz and (rowidx.min() < 0 or rowidx.max() >= nrows):
            raise ValueError("row index out of range")
        if np.any(values <= 0.0):
            k = int(np.argmax(values <= 0.0))
            raise ValueError(f"stored value at position {k} is not strictly positive")
        if nnz > 1:
            increasing = np.diff(rowidx) > 0
            # pairs straddling a column boundary are exempt
            starts = colptr[1:-1]
            starts = starts[(starts > 0) & (starts < nnz)]
            increasing[starts - 1] = True
            if not increasing.all():
                raise ValueError("row indices must be strictly increasing within a column")
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self.colptr = colptr
        self.rowidx = rowidx
        self.values = values

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return int(self.colptr[-1])

    def column_counts(self) -> np.ndarray:
        return np.diff(self.colptr)

    def column_indices(self) -> np.ndarray:
        """Column index of every stored entry, aligned with ``values``."""
        return np.repeat(np.arange(self.ncols, dtype=np.int64), self.column_counts())

    def to_dense(self) -> np.ndarray:
        """Densify, column-major, with explicit zeros elsewhere."""
        a = np.zeros((self.nrows, self.ncols), dtype=np.float64, order="F")
        a[self.rowidx, self.column_indices()] = self.values
        return a

    def __repr__(self):
        return (
            f"SparseNonnegMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"
        )


def from_dense(a, zero_tol: float = 0.0) -> SparseNonnegMatrix:
    """Compress a dense nonnegative array, dropping entries <= ``zero_tol``.

    Raises ``ValueError`` (with the coordinates of the first offender) if any
    entry is negative.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a 2-d array")
    if zero_tol < 0:
        raise ValueError("zero_tol must be nonnegative")
    neg = np.argwhere(a < 0)
    if neg.size:
        i, j = neg[0]
        raise ValueError(f"negative entry {a[i, j]!r} at ({i}, {j})")
    m, n = a.shape
    # scanning the transpose row-major enumerates entries in column order
    ci, ri = np.nonzero(a.T > zero_tol)
    colptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(ci, minlength=n), out=colptr[1:])
    return SparseNonnegMatrix(m, n, colptr, ri, a[ri, ci])


def from_coo(nrows, ncols, rows, cols, vals, zero_tol: float = 0.0) -> SparseNonnegMatrix:
    """Assemble from coordinate triplets; duplicate coordinates are summed."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    if not (rows.shape == cols.shape == vals.shape):
        raise ValueError("rows/cols/vals must have equal length")
    if rows.size and (rows.min() < 0 or rows.max() >= nrows):
        raise ValueError("row index out of range")
    if cols.size and (cols.min() < 0 or cols.max() >= ncols):
        raise ValueError("column index out of range")
    if np.any(vals < 0):
        raise ValueError("negative value in coordinate data")
    order = np.lexsort((rows, cols))
    rows, cols, vals = rows[order], cols[order], vals[order]
    if rows.size:
        fresh = np.empty(rows.size, dtype=bool)
        fresh[0] = True
        fresh[1:] = (np.diff(rows) != 0) | (np.diff(cols) != 0)
        starts = np.flatnonzero(fresh)
        vals = np.add.reduceat(vals, starts)
        rows, cols = rows[starts], cols[starts]
        keep = vals > zero_tol
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    colptr = np.zeros(ncols + 1, dtype=np.int64)
    np.cumsum(np.bincount(cols, minlength=ncols), out=colptr[1:])
    return SparseNonnegMatrix(nrows, ncols, colptr, rows, vals)


def transpose(x: SparseNonnegMatrix) -> SparseNonnegMatrix:
    """Transpose; an involution that preserves nnz."""
    return from_coo(x.ncols, x.nrows, x.column_indices(), x.rowidx, x.values)


def factor_sparsity(f) -> float:
    """Fraction of entries that are exactly zero (0.0 for an empty array).

    Coordinate-descent updates produce exact zeros, so no tolerance is used.
    """
    f = np.asarray(f)
    if f.size == 0:
        return 0.0
    return float(np.count_nonzero(f == 0) / f.size)


@dataclasses.dataclass
class FactorPair:
    """Dense nonnegative factors W (m x r) and H (r x n)."""

    W: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=np.float64)
        self.H = np.asarray(self.H, dtype=np.float64)
        if self.W.ndim != 2 or self.H.ndim != 2:
            raise ValueError("factors must be 2-d")
        if self.W.shape[1] != self.H.shape[0]:
            raise ValueError(
                f"inner dimensions disagree: {self.W.shape} vs {self.H.shape}"
            )
        if np.any(self.W < 0) or np.any(self.H < 0):
            raise ValueError("factor entries must be nonnegative")

    @property
    def rank(self) -> int:
        return self.W.shape[1]

    def product(self) -> np.ndarray:
        return self.W @ self.H


@dataclasses.dataclass
class WL1Problem:
    """A weighted-L1 factorization instance.

    ``lam`` scales the residual on the zero entries of ``X``: 1 recovers the
    plain L1 objective, 0 treats zeros as missing (completion).  ``init`` is
    one of ``"random"`` (uniform factors), ``"hals"`` (uniform factors
    refined by ``init_sweeps`` least-squares sweeps) or ``"explicit"``
    (``init_factors`` used as-is).  ``tol`` stops a solver once the decrease
    in relative error between consecutive sweeps falls below it; ``None``
    disables that rule so a run is bounded only by ``max_sweeps`` /
    ``time_limit``.
    """

    X: SparseNonnegMatrix
    rank: int
    lam: float = 1.0
    init: str = "hals"
    init_sweeps: int = 10
    init_factors: Optional[FactorPair] = None
    tol: Optional[float] = 1e-6
    max_sweeps: int = 200
    time_limit: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.X, SparseNonnegMatrix):
            raise TypeError("X must be a SparseNonnegMatrix")
        if self.rank < 1:
            raise ValueError("rank must be at least 1")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        if self.init not in ("random", "hals", "explicit"):
            raise ValueError(f"unknown init policy {self.init!r}")
        if self.init_sweeps < 0:
            raise ValueError("init_sweeps must be nonnegative")
        if self.init == "explicit":
            if self.init_factors is None:
                raise ValueError("explicit init requires init_factors")
            w, h = self.init_factors.W, self.init_factors.H
            if w.shape != (self.X.nrows, self.rank) or h.shape != (self.rank, self.X.ncols):
                raise ValueError("init_factors dimensions do not match the problem")
        if self.tol is not None and self.tol <= 0:
            raise ValueError("tol must be positive (or None to disable)")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive (or None)")


class SweepRecord(NamedTuple):
    sweep: int
    objective: float
    seconds: float
    w_sparsity: float
    h_sparsity: float


@dataclasses.dataclass
class SolveTrace:
    """Per-sweep log of a solver run.

    ``seconds`` entries are cumulative wall time of the main phase;
    ``warmup_seconds`` holds the time spent in warm-start sweeps, which do
    not count against a problem's time budget.
    """

    records: list = dataclasses.field(default_factory=list)
    warmup_seconds: float = 0.0

    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    def __len__(self):
        return len(self.records)
