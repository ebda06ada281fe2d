"""Constructive reduction between sign-matrix and binary rank-one problems.

A sign matrix M in {+-1}^(s x t) with budget D maps to the binary matrix X
in {0,1}^(2s x 2t) whose (i, j) block is the 2x2 identity permutation when
M_ij = +1 and the swap permutation when M_ij = -1, with budget T = st + D.
A +-1 witness (u, v) embeds blockwise into nonnegative (w, h) with the
exact identity  ||X - w h'||_1 = s t + ||M - u v'||_1 ,  and any
nonnegative (w, h) decodes through u_i = w_{2i-1} - w_{2i} (same for v)
with the inequality  ||X - w h'||_1 >= s t + ||M - u v'||_1 .
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .sparse_core import SparseNonnegMatrix, from_dense

__all__ = [
    "SignMatrix",
    "ReducedInstance",
    "encode",
    "embed_solution",
    "extract_solution",
    "best_binary_rank1",
    "verify_reduction",
]

_ENUM_LIMIT = 20


@dataclasses.dataclass(frozen=True)
class SignMatrix:
    """A matrix with entries in {+1, -1}."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.float64)
        if a.ndim != 2:
            raise ValueError("expected a 2-d matrix")
        if not np.all(np.abs(a) == 1):
            raise ValueError("entries must be +1 or -1")
        object.__setattr__(self, "entries", a)

    @property
    def shape(self):
        return self.entries.shape


@dataclasses.dataclass(frozen=True)
class ReducedInstance:
    """Encoded binary matrix and its transported budget T = s*t + D."""

    X: SparseNonnegMatrix
    budget: int


def encode(m: SignMatrix, budget: int = 0) -> ReducedInstance:
    """Encode each +-1 entry as a 2x2 permutation block."""
    a = m.entries
    s, t = a.shape
    x = np.zeros((2 * s, 2 * t))
    plus = a > 0
    x[0::2, 0::2] = plus
    x[1::2, 1::2] = plus
    x[0::2, 1::2] = ~plus
    x[1::2, 0::2] = ~plus
    return ReducedInstance(from_dense(x), s * t + int(budget))


def embed_solution(u, v):
    """Blockwise 0/1 lift of a +-1 witness: +1 -> (1, 0), -1 -> (0, 1)."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if not (np.all(np.abs(u) == 1) and np.all(np.abs(v) == 1)):
        raise ValueError("witness entries must be +1 or -1")
    w = np.zeros(2 * u.size)
    h = np.zeros(2 * v.size)
    w[0::2] = u > 0
    w[1::2] = u < 0
    h[0::2] = v > 0
    h[1::2] = v < 0
    return w, h


def extract_solution(w, h):
    """Decode nonnegative block factors into sign-problem candidates."""
    w = np.asarray(w, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if w.size % 2 or h.size % 2:
        raise ValueError("factors must have even length")
    if np.any(w < 0) or np.any(h < 0):
        raise ValueError("factors must be nonnegative")
    return w[0::2] - w[1::2], h[0::2] - h[1::2]


def best_binary_rank1(x):
    """Optimal binary rank-one approximation by enumeration.

    Enumerates all binary vectors along the shorter dimension; the other
    factor is chosen entrywise by majority (a coordinate is set to 1 only
    when that strictly lowers the error, ties go to 0).  Returns
    ``(w, h, error)`` minimizing ``||x - w h'||_1`` over binary rank-one
    products.  Guarded to min(m, n) <= 20.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if not np.all((x == 0) | (x == 1)):
        raise ValueError("matrix must be binary")
    m, n = x.shape
    if min(m, n) > _ENUM_LIMIT:
        raise ValueError(f"enumeration limited to min(m, n) <= {_ENUM_LIMIT}")
    swap = n < m
    a = x.T if swap else x  # enumerate over the shorter side (rows of a)
    k, other = a.shape

    best = (None, None, np.inf)
    cost_zero = a.sum(axis=0)  # per-column error of the all-zero counterpart
    bits = 1 << np.arange(k)
    for code in range(1 << k):
        w = ((code & bits) > 0).astype(np.float64)
        cost_one = np.abs(a - w[:, None]).sum(axis=0)
        h = (cost_one < cost_zero).astype(np.float64)
        err = float(np.where(h > 0, cost_one, cost_zero).sum())
        if err < best[2]:
            best = (w, h, err)
    w, h, err = best
    if swap:
        w, h = h, w
    return w, h, err


def verify_reduction(m: SignMatrix, w, h):
    """Both sides of the transport relation for given nonnegative factors.

    Returns ``(lhs, rhs)`` with ``lhs = ||X - w h'||_1`` on the encoded
    matrix and ``rhs = s t + ||M - u v'||_1`` for the decoded (u, v);
    lhs == rhs for embedded +-1 witnesses and lhs >= rhs always.
    """
    w = np.asarray(w, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    s, t = m.shape
    if w.size != 2 * s or h.size != 2 * t:
        raise ValueError("factor lengths must be twice the sign-matrix dimensions")
    x = encode(m).X.to_dense()
    lhs = float(np.abs(x - np.outer(w, h)).sum())
    u, v = extract_solution(w, h)
    rhs = float(s * t + np.abs(m.entries - np.outer(u, v)).sum())
    return lhs, rhs
