"""Checkerboard approximations of analytic copulas.

An analytic copula is wrapped as a vectorized evaluator that is probed for
copula properties at construction.  Its order-m checkerboard restricts the
evaluator to the uniform ``(m+1)^d`` grid and extends by multilinear
interpolation; the resulting density is constant on boxes.  The module also
provides the one-parameter families of order-2 checkerboards (bivariate and
trivariate) whose order-3 checkerboards collapse to the product copula only
at a single parameter value; these serve as exact oracles throughout the
test suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import (
    PiecewiseDensity,
    SubcopulaGrid,
    _box_volumes_from_grid,
    multilinear_eval,
)
from .errors import DomainError, NotACopulaError

_PROBE_POINTS = 21  # per-axis construction probe


@dataclass(frozen=True)
class AnalyticCopula:
    """A d-copula given by a vectorized evaluator ``(..., d) -> (...)``.

    Construction probes a fixed 21-point-per-axis grid: groundedness,
    uniform margins, and the pointwise copula bounds
    ``max(0, sum(u) - (d-1)) <= C(u) <= min(u)``.  Full d-increasingness is
    not decidable from an evaluator and is checked only where boxes are
    actually measured.
    """

    d: int
    func: object = field(compare=False)
    name: str = "copula"

    def __post_init__(self):
        if self.d < 2:
            raise DomainError("copula dimension must be >= 2")
        g = np.linspace(0.0, 1.0, _PROBE_POINTS)
        ones = np.ones(_PROBE_POINTS)
        for j in range(self.d):
            pts = np.tile(ones[:, None], (1, self.d))
            pts[:, j] = g
            vals = self(pts)
            if np.max(np.abs(vals - g)) > 1e-12:
                raise NotACopulaError(f"{self.name}: margin {j} is not uniform")
            pts[:, j] = 0.0
            if np.max(np.abs(self(pts))) > 1e-12:
                raise NotACopulaError(f"{self.name}: not grounded on axis {j}")
        if self.d <= 4:
            mesh = np.stack(np.meshgrid(*([g] * self.d), indexing="ij"), axis=-1)
            pts = mesh.reshape(-1, self.d)
        else:
            # the full lattice is too large; probe a fixed pseudo-random cloud
            rng = np.random.default_rng(0)
            pts = rng.random((20000, self.d))
        vals = self(pts)
        lower = np.maximum(pts.sum(axis=1) - (self.d - 1), 0.0)
        upper = pts.min(axis=1)
        if np.any(vals < lower - 1e-12) or np.any(vals > upper + 1e-12):
            raise NotACopulaError(f"{self.name}: violates the copula bounds")

    def __call__(self, u) -> np.ndarray | float:
        pts = np.asarray(u, dtype=float)
        scalar = pts.ndim == 1
        if scalar:
            pts = pts[None, :]
        if pts.shape[-1] != self.d:
            raise DomainError(f"points must have {self.d} coordinates")
        if np.any(pts < 0.0) or np.any(pts > 1.0):
            raise DomainError("points must lie in the unit cube")
        vals = np.asarray(self.func(pts), dtype=float)
        return float(vals[0]) if scalar else vals


@dataclass(frozen=True)
class CheckerboardCopula:
    """Order-m checkerboard of a copula: grid plus piecewise density.

    The grid equals the source copula at grid points and the density on each
    box is ``m^d`` times the box volume.
    """

    grid: SubcopulaGrid
    density: PiecewiseDensity
    source: str
    m: int

    @property
    def d(self) -> int:
        return self.grid.d

    def cdf(self, u) -> np.ndarray | float:
        return multilinear_eval(self.grid, u)

    def pdf(self, u) -> np.ndarray | float:
        pts = np.asarray(u, dtype=float)
        scalar = pts.ndim == 1
        if scalar:
            pts = pts[None, :]
        m = self.m
        idx = np.maximum(np.ceil(pts * m).astype(np.int64), 1) - 1
        vals = self.density.values[tuple(idx[..., j] for j in range(self.d))]
        return float(vals[0]) if scalar else vals

    def as_analytic(self) -> AnalyticCopula:
        """View the checkerboard itself as an analytic copula."""
        grid = self.grid
        return AnalyticCopula(self.d, lambda pts: multilinear_eval(grid, pts),
                              name=f"checkerboard({self.source}, m={self.m})")


def copula_box_volume(cop: AnalyticCopula, b, m: int) -> float:
    """Inclusion-exclusion volume of one closed partition box under ``cop``.

    Raises :class:`NotACopulaError` if the volume is below ``-1e-10`` (the
    evaluator is then not d-increasing); smaller negatives are clamped to 0.
    """
    d = cop.d
    b = tuple(int(i) for i in b)
    if len(b) != d or any(i < 1 or i > m for i in b):
        raise DomainError(f"box index {b} invalid for order {m}, dimension {d}")
    corners = []
    signs = []
    for eps in itertools.product((0, 1), repeat=d):
        corners.append([(b[j] - 1 + eps[j]) / m for j in range(d)])
        signs.append(-1.0 if (d - sum(eps)) % 2 else 1.0)
    vol = float(np.dot(signs, cop(np.asarray(corners))))
    if vol < -1e-10:
        raise NotACopulaError(
            f"{cop.name}: box {b} at order {m} has volume {vol:.3e}"
        )
    return max(vol, 0.0)


def checkerboard(cop: AnalyticCopula, m: int) -> CheckerboardCopula:
    """Order-m checkerboard approximation of an analytic copula.

    The subcopula values on the uniform grid are taken verbatim from the
    evaluator; the multilinear extension is then a copula whose density is
    constant on each box of the m-partition.
    """
    if m < 2:
        raise DomainError(f"checkerboard order must be >= 2, got {m}")
    d = cop.d
    axis = np.arange(m + 1) / m
    mesh = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1)
    t = np.asarray(cop(mesh.reshape(-1, d)), dtype=float).reshape((m + 1,) * d)
    vols = _box_volumes_from_grid(t)
    if vols.min() < -1e-10:
        raise NotACopulaError(
            f"{cop.name}: negative box volume {vols.min():.3e} at order {m}"
        )
    vols = np.clip(vols, 0.0, None)
    total = vols.sum()
    if abs(total - 1.0) > 1e-10:
        raise NotACopulaError(f"{cop.name}: box volumes sum to {total!r} at order {m}")
    # snap the grid boundary exactly; the probe already bounded the error
    for axis_id in range(d):
        idx = [slice(None)] * d
        idx[axis_id] = 0
        t[tuple(idx)] = 0.0
    t[(m,) * d] = 1.0
    grid = SubcopulaGrid(t)
    density = PiecewiseDensity(vols * (m**d / total))
    return CheckerboardCopula(grid=grid, density=density, source=cop.name, m=m)


# ---------------------------------------------------------------------------
# built-in families


def independence_copula(d: int = 2) -> AnalyticCopula:
    """Product copula ``u_1 * ... * u_d``."""
    return AnalyticCopula(d, lambda p: np.prod(p, axis=-1), name=f"independence(d={d})")


def comonotone_copula(d: int = 2) -> AnalyticCopula:
    """Upper bound copula ``min(u_1, ..., u_d)``."""
    return AnalyticCopula(d, lambda p: np.min(p, axis=-1), name=f"comonotone(d={d})")


def countermonotone_copula() -> AnalyticCopula:
    """Lower bound ``max(0, u + v - 1)``; a copula only in dimension 2."""
    return AnalyticCopula(
        2, lambda p: np.maximum(p[..., 0] + p[..., 1] - 1.0, 0.0),
        name="countermonotone",
    )


def frechet_mardia_copula(p: float) -> AnalyticCopula:
    """Convex mixture ``p * min(u,v) + (1-p) * max(0, u+v-1)``."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"mixture weight must be in [0, 1], got {p}")

    def f(pts):
        m = np.minimum(pts[..., 0], pts[..., 1])
        w = np.maximum(pts[..., 0] + pts[..., 1] - 1.0, 0.0)
        return p * m + (1.0 - p) * w

    return AnalyticCopula(2, f, name=f"frechet-mardia(p={p})")


def clayton_copula(theta: float) -> AnalyticCopula:
    """Bivariate Clayton copula, ``theta > 0``."""
    if theta <= 0:
        raise DomainError(f"clayton parameter must be > 0, got {theta}")

    def f(pts):
        u, v = pts[..., 0], pts[..., 1]
        out = np.zeros(u.shape)
        pos = (u > 0) & (v > 0)
        out[pos] = (u[pos] ** -theta + v[pos] ** -theta - 1.0) ** (-1.0 / theta)
        return out

    return AnalyticCopula(2, f, name=f"clayton(theta={theta})")


def gumbel_copula(theta: float) -> AnalyticCopula:
    """Bivariate Gumbel copula, ``theta >= 1``."""
    if theta < 1:
        raise DomainError(f"gumbel parameter must be >= 1, got {theta}")

    def f(pts):
        u, v = pts[..., 0], pts[..., 1]
        out = np.zeros(u.shape)
        pos = (u > 0) & (v > 0)
        lu, lv = -np.log(u[pos]), -np.log(v[pos])
        out[pos] = np.exp(-((lu**theta + lv**theta) ** (1.0 / theta)))
        return out

    return AnalyticCopula(2, f, name=f"gumbel(theta={theta})")


def frank_copula(theta: float) -> AnalyticCopula:
    """Bivariate Frank copula, ``theta != 0``."""
    if theta == 0:
        raise DomainError("frank parameter must be nonzero")

    def f(pts):
        u, v = pts[..., 0], pts[..., 1]
        num = np.expm1(-theta * u) * np.expm1(-theta * v)
        return -np.log1p(num / np.expm1(-theta)) / theta

    return AnalyticCopula(2, f, name=f"frank(theta={theta})")


def closed_form_c2_bivariate(alpha: float) -> AnalyticCopula:
    """The one-parameter family of all bivariate order-2 checkerboards.

    ``alpha`` is the mass of the lower-left quadrant and ranges over
    ``[0, 1/2]``; ``alpha = 1/4`` gives the product copula.  Evaluated by its
    four bilinear branches.
    """
    if not 0.0 <= alpha <= 0.5:
        raise DomainError(f"alpha must be in [0, 1/2], got {alpha}")

    def f(pts):
        u, v = pts[..., 0], pts[..., 1]
        lo_u, lo_v = u <= 0.5, v <= 0.5
        out = np.empty(u.shape)
        b = lo_u & lo_v
        out[b] = 4.0 * alpha * u[b] * v[b]
        b = lo_u & ~lo_v
        out[b] = 2.0 * alpha * u[b] + 4.0 * (0.5 - alpha) * u[b] * (v[b] - 0.5)
        b = ~lo_u & lo_v
        out[b] = 2.0 * alpha * v[b] + 4.0 * (0.5 - alpha) * (u[b] - 0.5) * v[b]
        b = ~lo_u & ~lo_v
        out[b] = (alpha + (1.0 - 2.0 * alpha) * (u[b] + v[b] - 1.0)
                  + 4.0 * alpha * (u[b] - 0.5) * (v[b] - 0.5))
        return out

    return AnalyticCopula(2, f, name=f"c2-bivariate(alpha={alpha})")


def closed_form_c2_trivariate(alpha0: float) -> AnalyticCopula:
    """The one-parameter family of trivariate order-2 checkerboards with all
    bivariate margins uniform on their own order-2 grids.

    ``alpha0`` is the mass of the lower octant and ranges over ``[0, 1/4]``;
    ``alpha0 = 1/8`` gives the product copula.  Evaluated by its eight
    trilinear branches.
    """
    if not 0.0 <= alpha0 <= 0.25:
        raise DomainError(f"alpha0 must be in [0, 1/4], got {alpha0}")
    a = alpha0

    def f(pts):
        u, v, w = pts[..., 0], pts[..., 1], pts[..., 2]
        hu, hv, hw = u > 0.5, v > 0.5, w > 0.5
        out = np.empty(u.shape)

        b = ~hu & ~hv & ~hw
        out[b] = 8 * a * u[b] * v[b] * w[b]
        b = ~hu & ~hv & hw
        out[b] = (2 - 8 * a) * u[b] * v[b] * w[b] + (8 * a - 1) * u[b] * v[b]
        b = ~hu & hv & ~hw
        out[b] = (2 - 8 * a) * u[b] * v[b] * w[b] + (8 * a - 1) * u[b] * w[b]
        b = hu & ~hv & ~hw
        out[b] = (2 - 8 * a) * u[b] * v[b] * w[b] + (8 * a - 1) * v[b] * w[b]
        b = ~hu & hv & hw
        out[b] = (8 * a * u[b] * v[b] * w[b] + (1 - 8 * a) * u[b] * v[b]
                  + (1 - 8 * a) * u[b] * w[b] + (8 * a - 1) * u[b])
        b = hu & ~hv & hw
        out[b] = (8 * a * u[b] * v[b] * w[b] + (1 - 8 * a) * u[b] * v[b]
                  + (1 - 8 * a) * v[b] * w[b] + (8 * a - 1) * v[b])
        b = hu & hv & ~hw
        out[b] = (8 * a * u[b] * v[b] * w[b] + (1 - 8 * a) * u[b] * w[b]
                  + (1 - 8 * a) * v[b] * w[b] + (8 * a - 1) * w[b])
        b = hu & hv & hw
        du, dv, dw = u[b] - 0.5, v[b] - 0.5, w[b] - 0.5
        out[b] = (a + (0.5 - 2 * a) * (du + dv + dw)
                  + 4 * a * (du * dv + du * dw + dv * dw)
                  + (2 - 8 * a) * du * dv * dw)
        return out

    return AnalyticCopula(3, f, name=f"c2-trivariate(alpha0={alpha0})")
