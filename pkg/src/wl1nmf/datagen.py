"""Reproducible synthetic-data generators for the benchmark experiments.

Every generator is a pure function of its parameters and a seed (numpy's
PCG64 stream), and zero counts are exact rather than probabilistic where a
fraction is requested.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .sparse_core import SparseNonnegMatrix, from_dense

__all__ = [
    "FalseZeroSpec",
    "LaplaceNoiseSpec",
    "gen_uniform_sparse",
    "gen_bernoulli",
    "gen_lowrank_falsezeros",
    "gen_saltpepper",
    "sample_laplace",
]

GENERATOR_FAMILY = "numpy.random.default_rng (PCG64)"


@dataclasses.dataclass(frozen=True)
class FalseZeroSpec:
    """Zeroing plan: a fraction q1 of all entries becomes zero, of which a
    fraction q2 are the smallest entries (thresholded "false zeros") and
    the rest are chosen at random (missing entries)."""

    q1: float
    q2: float

    def __post_init__(self):
        if not 0.0 <= self.q1 < 1.0:
            raise ValueError("q1 must lie in [0, 1)")
        if not 0.0 <= self.q2 <= 1.0:
            raise ValueError("q2 must lie in [0, 1]")


@dataclasses.dataclass(frozen=True)
class LaplaceNoiseSpec:
    """Zero-mean Laplace noise with the given diversity (E|noise| = diversity)."""

    diversity: float

    def __post_init__(self):
        if self.diversity <= 0:
            raise ValueError("diversity must be positive")


def _laplace(rng, spec: LaplaceNoiseSpec, count: int) -> np.ndarray:
    # inverse CDF: u ~ U(-1/2, 1/2) -> -sigma * sign(u) * log(1 - 2|u|)
    u = rng.random(count) - 0.5
    inner = np.clip(1.0 - 2.0 * np.abs(u), np.finfo(float).tiny, 1.0)
    return -spec.diversity * np.sign(u) * np.log(inner)


def sample_laplace(spec: LaplaceNoiseSpec, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` Laplace(0, diversity) variates, reproducible by seed."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    return _laplace(np.random.default_rng(seed), spec, count)


def gen_uniform_sparse(m: int, n: int, zero_frac: float, seed: int) -> SparseNonnegMatrix:
    """Entries uniform on (0, 1] with exactly round(zero_frac * m * n) of
    them (chosen uniformly) structurally zero."""
    if not 0.0 <= zero_frac < 1.0:
        raise ValueError("zero_frac must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    a = 1.0 - rng.random((m, n))  # (0, 1]: keeps kept entries strictly positive
    nzero = round(zero_frac * m * n)
    if nzero:
        flat = rng.choice(m * n, size=nzero, replace=False)
        a.flat[flat] = 0.0
    return from_dense(a)


def gen_bernoulli(m: int, n: int, p: float, seed: int) -> SparseNonnegMatrix:
    """Binary matrix with i.i.d. Bernoulli(p) entries."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    return from_dense((rng.random((m, n)) < p).astype(np.float64))


def gen_lowrank_falsezeros(m, n, r, noise: LaplaceNoiseSpec, fz: FalseZeroSpec, seed):
    """Noisy low-rank completion instance with two kinds of zeros.

    Builds a dense positive ground truth W_hat @ H_hat from Uniform(0,1)
    factors, adds Laplace noise (negative results are clipped to zero and
    count toward neither zero quota), then zeroes exactly
    round(q1*q2*m*n) smallest surviving entries (type I, ties broken by
    index) and round(q1*(1-q2)*m*n) further entries chosen at random among
    the remaining positives (type II).  Returns ``(X, truth)``.
    """
    if r < 1:
        raise ValueError("rank must be at least 1")
    rng = np.random.default_rng(seed)
    w_hat = rng.random((m, r))
    h_hat = rng.random((r, n))
    truth = w_hat @ h_hat
    noisy = truth + _laplace(rng, noise, m * n).reshape(m, n)
    np.clip(noisy, 0.0, None, out=noisy)

    n_type1 = round(fz.q1 * fz.q2 * m * n)
    n_type2 = round(fz.q1 * (1.0 - fz.q2) * m * n)
    flat = noisy.ravel()
    alive = np.flatnonzero(flat > 0)
    if n_type1 + n_type2 > alive.size:
        raise ValueError(
            f"cannot zero {n_type1 + n_type2} entries: only {alive.size} positive"
        )
    if n_type1:
        order = np.argsort(flat[alive], kind="stable")
        chosen = alive[order[:n_type1]]
        flat[chosen] = 0.0
        alive = np.setdiff1d(alive, chosen, assume_unique=True)
    if n_type2:
        flat[rng.choice(alive, size=n_type2, replace=False)] = 0.0
    return from_dense(noisy), truth


def gen_saltpepper(x: SparseNonnegMatrix, p: float, seed: int) -> SparseNonnegMatrix:
    """Flip each entry independently with probability p: zeros become 1,
    positive entries become 0.  Values must lie in [0, 1]."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if x.values.size and x.values.max() > 1.0:
        raise ValueError("salt-and-pepper flips require values in [0, 1]")
    rng = np.random.default_rng(seed)
    dense = x.to_dense()
    flips = rng.random(x.shape) < p
    flipped = np.where(flips, np.where(dense > 0, 0.0, 1.0), dense)
    return from_dense(flipped)
