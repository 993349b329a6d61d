"""Discrepancy functionals against the independence reference.

Under independence the sample copula density is 1 everywhere and the copula
itself is the product copula, so each functional is computed against that
closed-form reference.  The test statistic for a pseudo-sample averages the
order-2 and order-3 discrepancies; sample sizes must be divisible by 6 so
both orders are defined.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import PiecewiseDensity, SubcopulaGrid, product_grid_values
from .errors import DivisibilityError, DomainError
from .estimator import PseudoSample


class StatisticKind(enum.Enum):
    """The four test-statistic flavors, serialized as lowercase names."""

    TOTAL_VARIATION = "tv"
    HELLINGER = "hellinger"
    SUPREMUM = "sup"
    KULLBACK_LEIBLER = "kl"

    def __str__(self) -> str:
        return self.value


#: Column of each kind inside a kernel profile [tv, hellinger, kl, sup].
PROFILE_COLUMN = {
    StatisticKind.TOTAL_VARIATION: 0,
    StatisticKind.HELLINGER: 1,
    StatisticKind.KULLBACK_LEIBLER: 2,
    StatisticKind.SUPREMUM: 3,
}

ALL_KINDS = (
    StatisticKind.TOTAL_VARIATION,
    StatisticKind.HELLINGER,
    StatisticKind.SUPREMUM,
    StatisticKind.KULLBACK_LEIBLER,
)


def coerce_kind(kind: StatisticKind | str) -> StatisticKind:
    if isinstance(kind, StatisticKind):
        return kind
    try:
        return StatisticKind(kind)
    except ValueError:
        names = ", ".join(k.value for k in ALL_KINDS)
        raise DomainError(f"unknown statistic {kind!r}; expected one of {names}")


@dataclass(frozen=True)
class StatisticValue:
    """An observed statistic with the sample shape it came from."""

    kind: StatisticKind
    value: float
    n: int
    d: int


def tv_to_uniform(density: PiecewiseDensity) -> float:
    """Total variation distance to the uniform density.

    For densities constant on boxes this is half the integral of ``|f - 1|``,
    i.e. ``0.5 * mean(|f_b - 1|)`` over the ``m^d`` boxes.
    """
    return 0.5 * float(np.abs(density.values - 1.0).mean())


def hellinger_to_uniform(density: PiecewiseDensity) -> float:
    """Hellinger distance to the uniform density:
    ``sqrt(mean((sqrt(f_b) - 1)^2) / 2)``."""
    return float(np.sqrt(0.5 * ((np.sqrt(density.values) - 1.0) ** 2).mean()))


def kl_to_uniform(density: PiecewiseDensity) -> float:
    """Kullback-Leibler divergence to the uniform density, natural log.

    Empty boxes contribute 0 (the ``0 log 0 = 0`` convention); the reference
    density is positive so the divergence is always finite.
    """
    f = density.values
    pos = f[f > 0]
    return float((pos * np.log(pos)).sum() / f.size)


def tv_between(f: PiecewiseDensity, g: PiecewiseDensity) -> float:
    """Total variation distance between two densities on the same partition."""
    if f.values.shape != g.values.shape:
        raise DomainError("densities must share the same order and dimension")
    return 0.5 * float(np.abs(f.values - g.values).mean())


def sup_to_independence(grid: SubcopulaGrid) -> float:
    """Supremum distance between the grid's multilinear extension and the
    product copula.

    Both functions are multilinear on each partition box, so their difference
    attains its extremes at box vertices; the maximum over the ``(m+1)^d``
    grid points is therefore the true supremum over the whole cube.
    """
    return float(np.abs(grid.t - product_grid_values(grid.m, grid.d)).max())


def discrepancy_to_independence(density: PiecewiseDensity, grid: SubcopulaGrid,
                                kind: StatisticKind | str) -> float:
    """One order's discrepancy, dispatched on the statistic kind."""
    kind = coerce_kind(kind)
    if kind is StatisticKind.TOTAL_VARIATION:
        return tv_to_uniform(density)
    if kind is StatisticKind.HELLINGER:
        return hellinger_to_uniform(density)
    if kind is StatisticKind.KULLBACK_LEIBLER:
        return kl_to_uniform(density)
    return sup_to_independence(grid)


# dense (m+1)^d tensors stop being "trivial memory" somewhere past d = 12
MAX_DIMENSION = 12


def eta_profile(ps: PseudoSample) -> np.ndarray:
    """All four statistics at once: ``(profile_2 + profile_3) / 2`` with
    columns ordered [tv, hellinger, kl, sup]."""
    if ps.n % 6 != 0:
        raise DivisibilityError(ps.n, 6, f"sample size n={ps.n} must be divisible "
                                "by 6 (orders 2 and 3 are both required)")
    if ps.d > MAX_DIMENSION:
        raise DomainError(f"dimension {ps.d} exceeds the dense-tensor limit "
                          f"of {MAX_DIMENSION}")
    prof = _kernels.eta_profile(ps.ranks)
    return (prof[:4] + prof[4:]) / 2.0


def eta_statistic(ps: PseudoSample, kind: StatisticKind | str) -> StatisticValue:
    """Test statistic: average of the order-2 and order-3 discrepancies.

    Parameters
    ----------
    ps : PseudoSample
        Rank-transformed sample; ``n`` must be divisible by 6.
    kind : StatisticKind or str
        One of ``tv``, ``hellinger``, ``sup``, ``kl``.
    """
    kind = coerce_kind(kind)
    value = float(eta_profile(ps)[PROFILE_COLUMN[kind]])
    return StatisticValue(kind=kind, value=value, n=ps.n, d=ps.d)
