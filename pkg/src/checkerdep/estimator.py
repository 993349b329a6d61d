"""Rank transform and checkerboard-style copula estimation from data.

A raw sample is first mapped to its pseudo-sample (each coordinate replaced
by its within-column rank over ``n``), then box frequencies over the uniform
m-partition give the frequency tensor, whose cumulative sums form a
subcopula grid; the multilinear extension of that grid is the sample copula
of order m, and its density is constant on boxes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _rng
from .core import PiecewiseDensity, SubcopulaGrid, _freeze
from .errors import DivisibilityError, DomainError, TiesPresentError

TIE_POLICIES = ("error", "random")


@dataclass(frozen=True)
class PseudoSample:
    """Rank-transformed sample: each column of ``ranks`` is a permutation of 1..n."""

    ranks: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.ranks, dtype=np.int64)
        if r.ndim != 2 or r.shape[1] < 2:
            raise DomainError("ranks must be an (n, d) array with d >= 2")
        n = r.shape[0]
        expected = np.arange(1, n + 1)
        for j in range(r.shape[1]):
            if not np.array_equal(np.sort(r[:, j]), expected):
                raise DomainError(f"column {j} is not a permutation of 1..{n}")
        object.__setattr__(self, "ranks", _freeze(r))

    @property
    def n(self) -> int:
        return self.ranks.shape[0]

    @property
    def d(self) -> int:
        return self.ranks.shape[1]

    @property
    def points(self) -> np.ndarray:
        """Points in the open-closed unit cube, coordinate = rank / n."""
        return self.ranks / self.n


@dataclass(frozen=True)
class FrequencyTensor:
    """Box counts of a pseudo-sample over the uniform m-partition.

    ``counts`` has shape ``(m,)*d`` and sums to ``n``; relative frequencies
    are ``counts / n``.  Marginal slabs each hold exactly ``n/m`` points.
    """

    counts: np.ndarray
    n: int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim < 2 or len(set(c.shape)) != 1:
            raise DomainError("counts must be an (m,)*d tensor")
        if c.min() < 0 or c.sum() != self.n:
            raise DomainError("counts must be nonnegative and sum to n")
        m = c.shape[0]
        if self.n % m != 0:
            raise DivisibilityError(self.n, m)
        slab = self.n // m
        for axis in range(c.ndim):
            axes = tuple(a for a in range(c.ndim) if a != axis)
            if not np.all(c.sum(axis=axes) == slab):
                raise DomainError(f"marginal counts along axis {axis} are not n/m")
        object.__setattr__(self, "counts", _freeze(c))

    @property
    def m(self) -> int:
        return self.counts.shape[0]

    @property
    def d(self) -> int:
        return self.counts.ndim

    @property
    def s(self) -> np.ndarray:
        """Relative frequencies (entries sum to 1 exactly in rationals)."""
        return self.counts / self.n


def _rank_column(col: np.ndarray, column: int, tie_policy: str,
                 rng: np.random.Generator | None) -> np.ndarray:
    n = col.shape[0]
    if tie_policy == "error":
        if np.unique(col).size != n:
            raise TiesPresentError(column)
        order = np.argsort(col, kind="stable")
    elif tie_policy == "random":
        # seeded shuffle before a stable sort breaks ties uniformly at random
        jitter = rng.permutation(n)
        order = np.lexsort((jitter, col))
    else:
        raise DomainError(f"unknown tie policy {tie_policy!r}")
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(1, n + 1)
    return ranks


def pseudo_sample(raw, tie_policy: str = "error",
                  seed: int | None = None) -> PseudoSample:
    """Rank-transform a raw sample into the unit hypercube.

    Parameters
    ----------
    raw : array-like, shape (n, d)
        Observations; all values must be finite.
    tie_policy : {"error", "random"}
        With ``"error"``, any tied column values raise
        :class:`TiesPresentError` naming the column.  With ``"random"``,
        ties are broken by a seeded shuffle before ranking.
    seed : int, optional
        Master seed for the tie-breaking stream; required when
        ``tie_policy="random"``.

    Returns
    -------
    PseudoSample
        Coordinate ``j`` of observation ``i`` equals
        ``rank(raw[i, j] within column j) / n``.
    """
    x = np.asarray(raw, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 2:
        raise DomainError("raw sample must be an (n, d) array with n >= 1, d >= 2")
    if not np.all(np.isfinite(x)):
        raise DomainError("raw sample contains non-finite values")
    rng = None
    if tie_policy == "random":
        if seed is None:
            raise DomainError("tie_policy='random' requires a seed")
        rng = _rng.stream(seed, _rng.DOMAIN_TIEBREAK)
    ranks = np.column_stack(
        [_rank_column(x[:, j], j, tie_policy, rng) for j in range(x.shape[1])]
    )
    return PseudoSample(ranks)


def truncate_to_multiple(raw, k: int, seed: int) -> np.ndarray:
    """Drop ``n mod k`` rows, chosen by a seeded draw, keeping row order.

    This is an explicit opt-in convenience for data whose size does not
    divide evenly; it changes the sample and is never applied silently.
    """
    x = np.asarray(raw, dtype=float)
    n = x.shape[0]
    drop = n % k
    if drop == 0:
        return x
    rng = _rng.stream(seed, _rng.DOMAIN_TRUNCATE)
    discard = rng.choice(n, size=drop, replace=False)
    keep = np.setdiff1d(np.arange(n), discard)
    return x[keep]


def rank_boxes(ranks: np.ndarray, n: int, m: int) -> np.ndarray:
    """Zero-based box indices of rank coordinates: ``ceil(r*m/n) - 1``, exactly."""
    return (ranks * m + (n - 1)) // n - 1


def frequency_tensor(ps: PseudoSample, m: int) -> FrequencyTensor:
    """Relative box frequencies of the pseudo-sample over the m-partition.

    Requires ``m | n``; box membership is computed in integer arithmetic
    from the ranks, so boundary points land per the left-open convention.
    """
    if m < 2:
        raise DomainError(f"order must be >= 2, got {m}")
    if ps.n % m != 0:
        raise DivisibilityError(ps.n, m)
    boxes = rank_boxes(ps.ranks, ps.n, m)
    flat = boxes[:, 0]
    for j in range(1, ps.d):
        flat = flat * m + boxes[:, j]
    counts = np.bincount(flat, minlength=m**ps.d).reshape((m,) * ps.d)
    return FrequencyTensor(counts, ps.n)


def subcopula_grid(freq: FrequencyTensor) -> SubcopulaGrid:
    """Cumulative sums of the frequency tensor on the ``(m+1)^d`` grid.

    Grid values are exact rationals ``count / n`` and the integer cumulative
    counts are kept alongside the float tensor.
    """
    cum = freq.counts
    for axis in range(freq.d):
        cum = np.cumsum(cum, axis=axis)
    cum = np.pad(cum, [(1, 0)] * freq.d)
    return SubcopulaGrid(cum / freq.n, cum_counts=cum, n=freq.n)


def sample_copula_density(freq: FrequencyTensor) -> PiecewiseDensity:
    """Piecewise-constant density of the sample copula: ``m^d * s`` per box."""
    return PiecewiseDensity(freq.counts * (freq.m**freq.d / freq.n))
