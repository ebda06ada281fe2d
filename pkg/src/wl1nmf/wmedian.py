"""Scalar nonnegative least-absolute-deviation subproblems.

Solves  min_{a >= 0}  sum_s |x_s - a*y_s| + c*a  with y >= 0 and c >= 0.
The objective is piecewise linear with breakpoints at the ratios x_s/y_s
(the grouped term ``c`` contributes one more breakpoint at zero), and a
global minimum sits at the first breakpoint, in ascending order, whose
cumulative weight reaches half the total weight.  Sorting the breakpoints
makes the whole thing O(q log q) in the number of positive-weight terms.

Ties are resolved deterministically: the cumulative comparison is an exact
``>=`` and equal breakpoints are interchangeable (they carry the same
value), so the returned minimizer does not depend on input order.
"""

from __future__ import annotations

import dataclasses

import numpy as np

__all__ = [
    "BreakpointProblem",
    "IndeterminateSubproblem",
    "constrained_weighted_median",
    "lad_objective",
    "nnls_scalar",
]


class IndeterminateSubproblem(Exception):
    """Every a >= 0 is optimal (all weights vanish); caller decides."""


@dataclasses.dataclass
class BreakpointProblem:
    """One scalar LAD subproblem: numerators x, weights y >= 0, grouped c >= 0."""

    x: np.ndarray
    y: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        self.x = np.atleast_1d(np.asarray(self.x, dtype=np.float64))
        self.y = np.atleast_1d(np.asarray(self.y, dtype=np.float64))
        self.c = float(self.c)
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError("x and y must be 1-d sequences of equal length")
        if np.any(self.y < 0):
            raise ValueError("weights must be nonnegative")
        if self.c < 0:
            raise ValueError("c must be nonnegative")


def constrained_weighted_median(p: BreakpointProblem) -> float:
    """Minimizer of ``sum |x_s - a*y_s| + c*a`` over a >= 0.

    Zero-weight terms are constants and are skipped.  Raises
    :class:`IndeterminateSubproblem` when every y_s is zero and c is zero,
    in which case any nonnegative value is optimal and the caller should
    keep its current iterate.
    """
    pos = p.y > 0
    if not pos.any() and p.c == 0.0:
        raise IndeterminateSubproblem("all weights are zero")
    ratios = np.concatenate([p.x[pos] / p.y[pos], [0.0]])
    weights = np.concatenate([p.y[pos], [p.c]])
    order = np.argsort(ratios, kind="stable")
    ratios = ratios[order]
    cum = np.cumsum(weights[order])
    k = int(np.searchsorted(cum, 0.5 * cum[-1], side="left"))
    return float(max(0.0, ratios[k]))


def lad_objective(p: BreakpointProblem, alpha: float) -> float:
    """Evaluate ``sum |x_s - alpha*y_s| + c*alpha`` at alpha >= 0."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return float(np.abs(p.x - alpha * p.y).sum() + p.c * alpha)


def nnls_scalar(x, y) -> float:
    """Closed-form minimizer of ``||x - a*y||_2`` over a >= 0: max(0, x.y/||y||^2)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not np.any(y != 0):
        raise IndeterminateSubproblem("y is identically zero")
    return float(max(0.0, float(x @ y) / float(y @ y)))
