"""Uniform partitions of the unit hypercube and grid-based copula objects.

The unit cube ``[0,1]^d`` is partitioned into ``m^d`` boxes whose j-th side
is ``((i-1)/m, i/m]``, with the first interval closed at 0.  Two tensor
objects live on this partition: a piecewise-constant density (one value per
box) and a cumulative grid of subcopula values on the ``(m+1)^d`` lattice,
evaluable anywhere by d-multilinear interpolation.  Everything here is
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NotACopulaError

# Volumes from inclusion-exclusion may dip below zero by cancellation noise;
# anything worse than this is a genuinely invalid subcopula.
VOLUME_CLAMP = 1e-14


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def box_index(u, m: int) -> tuple[int, ...]:
    """Locate the partition box containing a point of the unit cube.

    Coordinate ``j`` maps to the unique ``i`` with ``u_j`` in
    ``((i-1)/m, i/m]``, except that the first interval is closed at 0.

    Parameters
    ----------
    u : sequence of float
        Point in ``[0,1]^d``.
    m : int
        Partition order, at least 2.

    Returns
    -------
    tuple of int
        1-based box index per coordinate, each in ``1..m``.
    """
    if m < 2:
        raise DomainError(f"partition order must be >= 2, got {m}")
    out = []
    for j, uj in enumerate(u):
        if not (0.0 <= uj <= 1.0):
            raise DomainError(f"coordinate {j} = {uj!r} outside [0, 1]")
        out.append(max(1, math.ceil(uj * m)))
    return tuple(out)


def _check_box(b, m: int, d: int) -> tuple[int, ...]:
    b = tuple(int(i) for i in b)
    if len(b) != d or any(i < 1 or i > m for i in b):
        raise DomainError(f"box index {b} invalid for order {m}, dimension {d}")
    return b


@dataclass(frozen=True)
class PiecewiseDensity:
    """Density that is constant on each box of the uniform m-partition.

    ``values`` has shape ``(m,)*d``; the integral against Lebesgue measure is
    ``values.sum() / m**d`` and must equal 1.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim < 2 or len(set(v.shape)) != 1:
            raise DomainError("density tensor must be (m,)*d with d >= 2")
        if np.any(v < 0):
            raise DomainError("density values must be nonnegative")
        if abs(v.sum() / v.size - 1.0) > 1e-12:
            raise DomainError("density must integrate to 1 over the unit cube")
        object.__setattr__(self, "values", _freeze(v))

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.ndim


@dataclass(frozen=True)
class SubcopulaGrid:
    """Cumulative subcopula values on the ``(m+1)^d`` uniform grid.

    ``t[i_1, ..., i_d]`` is the subcopula at the grid point
    ``(i_1/m, ..., i_d/m)``; it is 0 whenever any index is 0 and 1 at the
    all-``m`` corner.  When the grid originates from box counts,
    ``cum_counts`` holds the integer cumulative counts and ``n`` their
    denominator, so grid values are exact rationals ``count/n``.
    """

    t: np.ndarray
    cum_counts: np.ndarray | None = field(default=None, compare=False)
    n: int | None = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim < 2 or len(set(t.shape)) != 1 or t.shape[0] < 3:
            raise DomainError("grid tensor must be (m+1,)*d with m >= 2, d >= 2")
        m, d = t.shape[0] - 1, t.ndim
        for axis in range(d):
            face = np.take(t, 0, axis=axis)
            if np.any(face != 0.0):
                raise DomainError("grid values must be 0 where any index is 0")
        if abs(t[(m,) * d] - 1.0) > 1e-12:
            raise DomainError("grid value at the all-m corner must be 1")
        # uniform margins: all indices at m except one running coordinate
        for axis in range(d):
            sel = [m] * d
            for k in range(m + 1):
                sel[axis] = k
                if abs(t[tuple(sel)] - k / m) > 1e-9:
                    raise DomainError(
                        f"margin along axis {axis} at level {k} is "
                        f"{t[tuple(sel)]!r}, expected {k / m!r}"
                    )
        vols = _box_volumes_from_grid(t)
        if vols.min() < -VOLUME_CLAMP:
            raise NotACopulaError(
                f"negative box volume {vols.min():.3e}: grid is not d-increasing"
            )
        if abs(vols.sum() - 1.0) > 1e-12:
            raise DomainError("box volumes must sum to 1")
        object.__setattr__(self, "t", _freeze(t))
        if self.cum_counts is not None:
            cc = np.asarray(self.cum_counts, dtype=np.int64)
            if cc.shape != t.shape or self.n is None:
                raise DomainError("cum_counts must match the grid shape and carry n")
            object.__setattr__(self, "cum_counts", _freeze(cc))

    @property
    def m(self) -> int:
        return self.t.shape[0] - 1

    @property
    def d(self) -> int:
        return self.t.ndim

    def evaluate(self, u) -> np.ndarray | float:
        """Multilinear interpolation at one point or a batch of points."""
        return multilinear_eval(self, u)


def _box_volumes_from_grid(t: np.ndarray) -> np.ndarray:
    """All inclusion-exclusion box volumes, as the d-fold difference of t."""
    v = t
    for axis in range(t.ndim):
        v = np.diff(v, axis=axis)
    return v


def grid_box_volumes(grid: SubcopulaGrid) -> np.ndarray:
    """Tensor of all ``m^d`` box volumes of the grid (tiny negatives clamped)."""
    if grid.cum_counts is not None:
        v = grid.cum_counts
        for axis in range(v.ndim):
            v = np.diff(v, axis=axis)
        return v / grid.n
    return np.clip(_box_volumes_from_grid(grid.t), 0.0, None)


def grid_box_volume(grid: SubcopulaGrid, b) -> float:
    """Inclusion-exclusion volume of one box of the grid.

    Exact (integer arithmetic over ``n``) when the grid carries counts.
    Values in ``[-1e-14, 0)`` are clamped to 0; anything more negative
    raises, since the grid would not be d-increasing.
    """
    b = _check_box(b, grid.m, grid.d)
    if grid.cum_counts is not None:
        total = 0
        for eps in itertools.product((0, 1), repeat=grid.d):
            corner = tuple(b[j] - 1 + eps[j] for j in range(grid.d))
            sign = -1 if (grid.d - sum(eps)) % 2 else 1
            total += sign * int(grid.cum_counts[corner])
        return total / grid.n
    total = 0.0
    for eps in itertools.product((0, 1), repeat=grid.d):
        corner = tuple(b[j] - 1 + eps[j] for j in range(grid.d))
        sign = -1 if (grid.d - sum(eps)) % 2 else 1
        total += sign * grid.t[corner]
    if total < -VOLUME_CLAMP:
        raise NotACopulaError(f"box {b} has volume {total:.3e}")
    return max(total, 0.0)


def multilinear_eval(grid: SubcopulaGrid, u) -> np.ndarray | float:
    """Evaluate the d-multilinear extension of a subcopula grid.

    The value at ``u`` interpolates the ``2^d`` surrounding grid values and
    agrees exactly with the stored values at grid points.  Accepts a single
    point of length ``d`` or an array of shape ``(..., d)``.

    Parameters
    ----------
    grid : SubcopulaGrid
    u : array-like
        Point(s) in ``[0,1]^d``.

    Returns
    -------
    float or ndarray
        Copula value(s) in ``[0,1]``.
    """
    pts = np.asarray(u, dtype=float)
    scalar = pts.ndim == 1
    if scalar:
        pts = pts[None, :]
    if pts.shape[-1] != grid.d:
        raise DomainError(f"points must have {grid.d} coordinates")
    if np.any(pts < 0.0) or np.any(pts > 1.0):
        raise DomainError("points must lie in the unit cube")
    m, d = grid.m, grid.d
    scaled = pts * m
    cell = np.minimum(scaled.astype(np.int64), m - 1)
    frac = scaled - cell
    flat_t = grid.t.reshape(-1)
    strides = np.array([(m + 1) ** (d - 1 - j) for j in range(d)], dtype=np.int64)
    base = cell @ strides
    out = np.zeros(pts.shape[:-1], dtype=float)
    for eps in itertools.product((0, 1), repeat=d):
        w = np.ones_like(out)
        off = 0
        for j, e in enumerate(eps):
            w = w * (frac[..., j] if e else 1.0 - frac[..., j])
            off += int(e) * int(strides[j])
        out += w * flat_t[base + off]
    return float(out[0]) if scalar else out


def product_grid_values(m: int, d: int) -> np.ndarray:
    """Values of the product copula on the ``(m+1)^d`` grid."""
    axis = np.arange(m + 1) / m
    t = axis
    for _ in range(d - 1):
        t = np.multiply.outer(t, axis)
    return t


def product_subcopula_grid(m: int, d: int) -> SubcopulaGrid:
    """SubcopulaGrid of the independence copula at order m."""
    return SubcopulaGrid(product_grid_values(m, d))
