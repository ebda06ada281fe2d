"""Closed-form zero-solution probabilities, gain formula, error metrics.

For x, y drawn entrywise Bernoulli(p) in {0,1}^m, the probability that the
nonnegative LAD problem min_{a>=0} ||x - a y||_1 has a positive optimum is

    P(a1 > 0) = (1-p)^m
              + sum_{k=1}^m p^k (1-p)^{m-k} C(m,k)
                  sum_{i=0}^{floor(k/2)} (1-p)^i p^{k-i} C(k,i)

and for the least-squares counterpart min_{a>=0} ||x - a y||_2

    P(a2 > 0) = (1-p)^m
              + sum_{k=1}^m p^k (1-p)^{m-k} C(m,k) (1 - (1-p)^k).

Conventions: y = 0 makes every a >= 0 optimal and counts as positive; when
the support size k is even and x has exactly k/2 ones on it, any a in
[0, 1] is optimal for the LAD problem and that event also counts positive.
Binomial coefficients are evaluated through log-gamma and the outer terms
are accumulated smallest-first, which keeps the sums stable for m in the
hundreds.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .scd_solver import objective
from .sparse_core import SparseNonnegMatrix, factor_sparsity
from .wmedian import (
    BreakpointProblem,
    IndeterminateSubproblem,
    constrained_weighted_median,
    lad_objective,
    nnls_scalar,
)

__all__ = [
    "BernoulliLADSetting",
    "ErrorReport",
    "DegenerateInputError",
    "prob_alpha1_positive",
    "prob_alpha2_positive",
    "prob_mc_estimate",
    "lad_positive_decider",
    "lsq_positive_decider",
    "sigma_gain",
    "error_report",
]


class DegenerateInputError(ValueError):
    """A quantity is undefined for the given input (e.g. an all-zero matrix)."""


@dataclasses.dataclass(frozen=True)
class BernoulliLADSetting:
    """Dimension m and Bernoulli parameter p of one random scalar problem."""

    m: int
    p: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")


def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def _finish(terms: np.ndarray) -> float:
    total = float(np.sort(terms).sum())
    return min(1.0, max(0.0, total))


def prob_alpha1_positive(s: BernoulliLADSetting) -> float:
    """Probability that the LAD optimum is positive."""
    m, p = s.m, s.p
    if p == 0.0 or p == 1.0:
        return 1.0
    k = np.arange(1, m + 1, dtype=np.float64)
    log_pmf = _log_binom(m, k) + k * math.log(p) + (m - k) * math.log1p(-p)
    # P(Binom(k, 1-p) <= floor(k/2)): at most half of the support carries zeros
    imax = np.arange(1, m + 1) // 2
    i = np.arange(int(imax.max()) + 1, dtype=np.float64)[None, :]
    kcol = k[:, None]
    logt = (
        _log_binom(kcol, np.minimum(i, kcol))
        + i * math.log1p(-p)
        + (kcol - i) * math.log(p)
    )
    logt = np.where(i <= imax[:, None], logt, -np.inf)
    inner = np.exp(logsumexp(logt, axis=1))
    terms = np.append(np.exp(log_pmf) * inner, math.exp(m * math.log1p(-p)))
    return _finish(terms)


def prob_alpha2_positive(s: BernoulliLADSetting) -> float:
    """Probability that the nonnegative least-squares optimum is positive."""
    m, p = s.m, s.p
    if p == 0.0 or p == 1.0:
        return 1.0
    k = np.arange(1, m + 1, dtype=np.float64)
    log_pmf = _log_binom(m, k) + k * math.log(p) + (m - k) * math.log1p(-p)
    inner = -np.expm1(k * math.log1p(-p))  # 1 - (1-p)^k
    terms = np.append(np.exp(log_pmf) * inner, math.exp(m * math.log1p(-p)))
    return _finish(terms)


def lad_positive_decider(x, y) -> bool:
    """Positivity of the LAD optimum, decided by the weighted median.

    Applies the counting conventions above: an indeterminate problem
    (y = 0) is positive, and a zero median that ties with some positive
    breakpoint is positive.  Exact for integer-valued data.
    """
    p = BreakpointProblem(x, y, 0.0)
    try:
        med = constrained_weighted_median(p)
    except IndeterminateSubproblem:
        return True
    if med > 0:
        return True
    pos = p.y > 0
    breaks = p.x[pos] / p.y[pos]
    breaks = breaks[breaks > 0]
    if breaks.size == 0:
        return False
    best_pos = min(lad_objective(p, b) for b in np.unique(breaks))
    return best_pos <= lad_objective(p, 0.0)


def lsq_positive_decider(x, y) -> bool:
    """Positivity of the nonnegative least-squares optimum."""
    try:
        return nnls_scalar(x, y) > 0
    except IndeterminateSubproblem:
        return True


def prob_mc_estimate(s: BernoulliLADSetting, which: str, samples: int, seed: int):
    """Monte-Carlo estimate of P(a > 0) with its standard error.

    Draws ``samples`` pairs x, y entrywise Bernoulli(p) and counts positive
    optima under the same conventions as the closed forms.  For binary
    data the LAD decision reduces to "at least as many ones as zeros of x
    on the support of y", which is what the vectorized count implements;
    :func:`lad_positive_decider` / :func:`lsq_positive_decider` give the
    per-sample reference decisions.
    """
    if which not in ("alpha1", "alpha2"):
        raise ValueError("which must be 'alpha1' or 'alpha2'")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    xs = rng.random((samples, s.m)) < s.p
    ys = rng.random((samples, s.m)) < s.p
    k = ys.sum(axis=1)
    q = (xs & ys).sum(axis=1)
    if which == "alpha1":
        positive = 2 * q >= k
    else:
        positive = (q > 0) | (k == 0)
    est = float(positive.mean())
    se = math.sqrt(est * (1.0 - est) / samples)
    return est, se


def sigma_gain(m: int, n: int, nnz: int) -> float:
    """Theoretical per-sweep speedup of the sparse pass over the dense one.

    The ratio ``m n log(m n) / (nnz log nnz)`` of the two per-sweep costs;
    base-independent.  Undefined for nnz < 2 (or m*n < 2).
    """
    if nnz < 2 or m * n < 2:
        raise DegenerateInputError("gain is undefined for nnz < 2 or m*n < 2")
    mn = m * n
    return float(mn * math.log(mn)) / float(nnz * math.log(nnz))


@dataclasses.dataclass(frozen=True)
class ErrorReport:
    rel_l1: float
    rel_fro_vs_truth: Optional[float]
    w_sparsity: float
    h_sparsity: float


def error_report(x: SparseNonnegMatrix, truth, w, h, lam) -> ErrorReport:
    """Relative weighted-L1 error, plus Frobenius error when a ground truth is given."""
    norm1 = float(x.values.sum())
    if norm1 == 0.0:
        raise DegenerateInputError("relative error is undefined for an all-zero matrix")
    rel_l1 = objective(x, w, h, lam) / norm1
    rel_fro = None
    if truth is not None:
        truth = np.asarray(truth, dtype=np.float64)
        denom = float(np.linalg.norm(truth))
        if denom == 0.0:
            raise DegenerateInputError("ground truth has zero norm")
        rel_fro = float(np.linalg.norm(truth - np.asarray(w) @ np.asarray(h)) / denom)
    return ErrorReport(float(rel_l1), rel_fro, factor_sparsity(w), factor_sparsity(h))
