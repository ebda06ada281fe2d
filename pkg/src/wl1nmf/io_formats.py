"""File interchange: MatrixMarket coordinate files and simple CSV.

Values are printed with 17 significant digits so a write/read round trip
reproduces every double bit-exactly.  The parser rejects malformed input
with the offending line number; it never repairs silently.
"""

from __future__ import annotations

import numpy as np

from .sparse_core import SparseNonnegMatrix, SolveTrace, from_coo

__all__ = [
    "MatrixMarketError",
    "read_matrix_market",
    "write_matrix_market",
    "read_dense_csv",
    "write_dense_csv",
    "write_trace_csv",
]

_FIELDS = ("real", "integer", "pattern")


class MatrixMarketError(ValueError):
    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


def read_matrix_market(path) -> SparseNonnegMatrix:
    """Parse a coordinate-format MatrixMarket file.

    Accepts the ``real``, ``integer`` and ``pattern`` fields (pattern
    entries get value 1.0) with ``general`` symmetry; indices are 1-based,
    duplicates are summed, and negative values are rejected.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixMarketError(path, 1, "empty file")

    header = lines[0].split()
    if len(header) != 5 or not header[0].startswith("%%MatrixMarket"):
        raise MatrixMarketError(path, 1, "malformed MatrixMarket header")
    _, obj, fmt, field, symmetry = (tok.lower() for tok in header)
    if obj != "matrix":
        raise MatrixMarketError(path, 1, f"unsupported object {obj!r}")
    if fmt != "coordinate":
        raise MatrixMarketError(path, 1, f"unsupported format {fmt!r} (coordinate only)")
    if field not in _FIELDS:
        raise MatrixMarketError(path, 1, f"unsupported field {field!r}")
    if symmetry != "general":
        raise MatrixMarketError(
            path, 1, f"symmetry {symmetry!r} not supported (general only)"
        )
    pattern = field == "pattern"

    body = [
        (no, line)
        for no, line in enumerate(lines[1:], start=2)
        if line.strip() and not line.lstrip().startswith("%")
    ]
    if not body:
        raise MatrixMarketError(path, len(lines), "missing size line")

    size_no, size_line = body[0]
    tokens = size_line.split()
    try:
        m, n, nnz = (int(t) for t in tokens)
    except ValueError:
        raise MatrixMarketError(path, size_no, f"malformed size line {size_line!r}")
    if m < 0 or n < 0 or nnz < 0:
        raise MatrixMarketError(path, size_no, "negative dimension or count")
    entries = body[1:]
    if len(entries) != nnz:
        raise MatrixMarketError(
            path, size_no, f"size line promises {nnz} entries, file has {len(entries)}"
        )

    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.float64)
    want = 2 if pattern else 3
    for k, (no, line) in enumerate(entries):
        tokens = line.split()
        if len(tokens) != want:
            raise MatrixMarketError(path, no, f"expected {want} fields, got {len(tokens)}")
        try:
            i, j = int(tokens[0]), int(tokens[1])
            v = 1.0 if pattern else float(tokens[2])
        except ValueError:
            raise MatrixMarketError(path, no, f"malformed entry {line!r}")
        if not (1 <= i <= m and 1 <= j <= n):
            raise MatrixMarketError(path, no, f"index ({i}, {j}) outside {m} x {n}")
        if v < 0:
            raise MatrixMarketError(path, no, f"negative value {v!r}")
        rows[k], cols[k], vals[k] = i - 1, j - 1, v
    return from_coo(m, n, rows, cols, vals)


def write_matrix_market(x: SparseNonnegMatrix, path, comments=()):
    """Write in coordinate/real/general form, one comment line per entry of
    ``comments`` (used to record generator metadata)."""
    colidx = x.column_indices()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        for comment in comments:
            fh.write(f"% {comment}\n")
        fh.write(f"{x.nrows} {x.ncols} {x.nnz}\n")
        for i, j, v in zip(x.rowidx, colidx, x.values):
            fh.write(f"{i + 1} {j + 1} {v:.17g}\n")


def read_dense_csv(path) -> np.ndarray:
    """Read a comma-separated dense matrix, honoring an optional ``# m n`` header."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    rows = []
    declared = None
    for no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if declared is not None or rows:
                raise ValueError(f"{path}:{no}: unexpected header line")
            tokens = stripped[1:].split()
            if len(tokens) != 2:
                raise ValueError(f"{path}:{no}: header must be '# m n'")
            declared = (int(tokens[0]), int(tokens[1]))
            continue
        try:
            rows.append([float(tok) for tok in stripped.split(",")])
        except ValueError:
            raise ValueError(f"{path}:{no}: malformed row {stripped!r}")
        if len(rows[-1]) != len(rows[0]):
            raise ValueError(f"{path}:{no}: inconsistent row length")
    if not rows:
        raise ValueError(f"{path}: no data rows")
    a = np.array(rows, dtype=np.float64)
    if declared is not None and a.shape != declared:
        raise ValueError(f"{path}: header declares {declared}, data is {a.shape}")
    return a


def write_dense_csv(f, path):
    f = np.atleast_2d(np.asarray(f, dtype=np.float64))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {f.shape[0]} {f.shape[1]}\n")
        for row in f:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def write_trace_csv(trace: SolveTrace, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sweep,objective,seconds,w_sparsity,h_sparsity\n")
        for rec in trace.records:
            fh.write(
                f"{rec.sweep},{rec.objective:.17g},{rec.seconds:.17g},"
                f"{rec.w_sparsity:.17g},{rec.h_sparsity:.17g}\n"
            )
