"""Seeded sampling from the copula families used in power studies.

Every sampler is a pure function of ``(parameters, seed, stream)``: the pair
fully determines the output, and distinct streams are independent, so
parallel replication can assign ``stream = replication index`` and get
results that do not depend on worker count or call order.

Archimedean families use the frailty construction ``U_j = psi(E_j / V)``
with ``V`` gamma (Clayton), positive stable (Gumbel, via the
Chambers-Mallows-Stuck sampler) or logarithmic-series (Frank) distributed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _rng
from .errors import ConfigError, DomainError
from .estimator import PseudoSample

ARCHIMEDEAN_FAMILIES = ("clayton", "gumbel", "frank")
ELLIPTICAL_FAMILIES = ("gaussian", "student")


def sample_null(d: int, n: int, seed: int, stream: int = 0) -> PseudoSample:
    """Pseudo-sample under independence: d independent rank permutations.

    This is exactly the distribution of ranks of n i.i.d. continuous vectors
    with independent coordinates, with no ties by construction.
    """
    if d < 2 or n < 1:
        raise DomainError("need d >= 2 and n >= 1")
    rng = _rng.stream(seed, _rng.DOMAIN_NULL, stream)
    return PseudoSample(null_ranks(d, n, rng))


def null_ranks(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Bare (n, d) rank matrix of independent permutations of 1..n."""
    return np.column_stack([rng.permutation(n) + 1 for _ in range(d)])


def _stable_positive(alpha: float, size: int, rng: np.random.Generator) -> np.ndarray:
    # Chambers-Mallows-Stuck sampler for the positive stable law with
    # Laplace transform exp(-s^alpha), 0 < alpha < 1; the angle is mapped
    # into (0, pi] so sin(theta) never vanishes
    theta = np.pi * (1.0 - rng.uniform(size=size))
    w = rng.exponential(size=size)
    return (np.sin(alpha * theta) / np.sin(theta) ** (1.0 / alpha)
            * (np.sin((1.0 - alpha) * theta) / w) ** ((1.0 - alpha) / alpha))


def _archimedean_from_rng(family: str, theta: float, d: int, n: int,
                          rng: np.random.Generator) -> np.ndarray:
    e = rng.exponential(size=(n, d))
    if family == "clayton":
        v = rng.gamma(1.0 / theta, 1.0, size=n)
        return (1.0 + e / v[:, None]) ** (-1.0 / theta)
    if family == "gumbel":
        if theta == 1.0:
            return np.exp(-e)
        v = _stable_positive(1.0 / theta, n, rng)
        return np.exp(-((e / v[:, None]) ** (1.0 / theta)))
    # frank
    p = -np.expm1(-theta)
    v = rng.logseries(p, size=n)
    return -np.log1p(-p * np.exp(-e / v[:, None])) / theta


def sample_archimedean(family: str, theta: float, d: int, n: int,
                       seed: int, stream: int = 0) -> np.ndarray:
    """n i.i.d. d-vectors from a Clayton, Gumbel or Frank copula.

    Parameter domains: Clayton ``theta > 0``, Gumbel ``theta >= 1``, Frank
    ``theta != 0`` (negative Frank only for d = 2, by reflecting the second
    coordinate of a ``-theta`` draw).
    """
    if family not in ARCHIMEDEAN_FAMILIES:
        raise DomainError(f"unknown Archimedean family {family!r}")
    if d < 2:
        raise DomainError("need d >= 2")
    rng = _rng.stream(seed, _rng.DOMAIN_SAMPLER, stream)
    if family == "clayton" and theta <= 0:
        raise DomainError(f"clayton requires theta > 0, got {theta}")
    if family == "gumbel" and theta < 1:
        raise DomainError(f"gumbel requires theta >= 1, got {theta}")
    if family == "frank":
        if theta == 0:
            raise DomainError("frank requires theta != 0")
        if theta < 0:
            if d != 2:
                raise DomainError("negative frank parameter only supported for d=2")
            u = _archimedean_from_rng("frank", -theta, d, n, rng)
            u[:, 1] = 1.0 - u[:, 1]
            return u
    return _archimedean_from_rng(family, theta, d, n, rng)


def sample_frechet_mardia(p: float, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """Mixture of the two Frechet-Hoeffding bounds: with probability ``p``
    emit (U, U), otherwise (U, 1-U)."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"mixture weight must be in [0, 1], got {p}")
    rng = _rng.stream(seed, _rng.DOMAIN_SAMPLER, stream)
    u = rng.uniform(size=n)
    on_diagonal = rng.uniform(size=n) < p
    v = np.where(on_diagonal, u, 1.0 - u)
    return np.column_stack([u, v])


def sample_gumbel_id_mixture(p: float, theta: float, n: int,
                             seed: int, stream: int = 0) -> np.ndarray:
    """Gumbel draw with probability ``p``; otherwise the draw reflected via
    ``(u, v) -> (u, 1 - v)``."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"mixture weight must be in [0, 1], got {p}")
    if theta < 1:
        raise DomainError(f"gumbel requires theta >= 1, got {theta}")
    rng = _rng.stream(seed, _rng.DOMAIN_SAMPLER, stream)
    u = _archimedean_from_rng("gumbel", theta, 2, n, rng)
    keep = rng.uniform(size=n) < p
    u[:, 1] = np.where(keep, u[:, 1], 1.0 - u[:, 1])
    return u


def equicorrelation_matrix(d: int, rho: float) -> np.ndarray:
    """Correlation matrix with a common pairwise correlation."""
    if d < 2:
        raise DomainError("need d >= 2")
    if not -1.0 / (d - 1) < rho < 1.0:
        raise DomainError(
            f"equicorrelation rho={rho} outside (-1/{d - 1}, 1) for d={d}"
        )
    return (1.0 - rho) * np.eye(d) + rho * np.ones((d, d))


def sample_elliptical_corr(family: str, corr: np.ndarray, n: int, seed: int,
                           stream: int = 0, nu: float | None = None) -> np.ndarray:
    """Gaussian or Student t sample with an arbitrary correlation matrix.

    Student t divides a Gaussian vector by ``sqrt(W / nu)`` with one
    chi-square ``W`` per observation.  Raw (unranked) values are returned;
    rank transformation happens downstream.
    """
    if family not in ELLIPTICAL_FAMILIES:
        raise DomainError(f"unknown elliptical family {family!r}")
    corr = np.asarray(corr, dtype=float)
    try:
        chol = np.linalg.cholesky(corr)
    except np.linalg.LinAlgError:
        raise DomainError("correlation matrix is not positive definite")
    rng = _rng.stream(seed, _rng.DOMAIN_SAMPLER, stream)
    z = rng.standard_normal((n, corr.shape[0])) @ chol.T
    if family == "gaussian":
        return z
    if nu is None or nu <= 0:
        raise DomainError(f"student requires nu > 0, got {nu}")
    w = rng.chisquare(nu, size=n)
    return z / np.sqrt(w / nu)[:, None]


def sample_elliptical(family: str, d: int, rho: float, n: int, seed: int,
                      stream: int = 0, nu: float | None = None) -> np.ndarray:
    """Equicorrelation convenience around :func:`sample_elliptical_corr`."""
    return sample_elliptical_corr(family, equicorrelation_matrix(d, rho),
                                  n, seed, stream=stream, nu=nu)


# ---------------------------------------------------------------------------
# sampler specifications

# family -> (ordered params, {param: (type, required)}), d defaults to 2
_FAMILY_PARAMS = {
    "independence": {"d": int},
    "clayton": {"theta": float, "d": int},
    "gumbel": {"theta": float, "d": int},
    "frank": {"theta": float, "d": int},
    "fm": {"p": float},
    "gumbelid": {"p": float, "theta": float},
    "gaussian": {"d": int, "rho": float},
    "student": {"d": int, "rho": float, "nu": float},
    "gaussianpair": {"d": int, "rho": float},
}
_REQUIRED = {
    "independence": ("d",),
    "clayton": ("theta",),
    "gumbel": ("theta",),
    "frank": ("theta",),
    "fm": ("p",),
    "gumbelid": ("p", "theta"),
    "gaussian": ("d", "rho"),
    "student": ("d", "rho", "nu"),
    "gaussianpair": ("d", "rho"),
}


@dataclass(frozen=True)
class CopulaSamplerSpec:
    """A named copula family with parameters, e.g. ``clayton:theta=2``.

    ``gaussianpair`` correlates the first two coordinates at ``rho`` and
    leaves the remaining ones independent (the partial-independence design).
    """

    family: str
    params: tuple  # sorted (name, value) pairs

    def __post_init__(self):
        if self.family not in _FAMILY_PARAMS:
            raise ConfigError(f"unknown sampler family {self.family!r}")
        allowed = _FAMILY_PARAMS[self.family]
        given = dict(self.params)
        for name in given:
            if name not in allowed:
                raise ConfigError(f"{self.family}: unexpected parameter {name!r}")
        for name in _REQUIRED[self.family]:
            if name not in given:
                raise ConfigError(f"{self.family}: missing parameter {name!r}")
        norm = []
        for name in allowed:
            if name in given:
                value = given[name]
                if allowed[name] is int and float(value) != int(value):
                    raise ConfigError(f"{self.family}: {name} must be an integer")
                norm.append((name, allowed[name](value)))
            elif name == "d":
                norm.append(("d", 2))
        if dict(norm).get("d", 2) < 2:
            raise ConfigError(f"{self.family}: d must be at least 2")
        object.__setattr__(self, "params", tuple(norm))
        # eager domain validation via a 1-row draw
        draw_sample(self, n=1, seed=0)

    @property
    def d(self) -> int:
        return int(dict(self.params).get("d", 2))

    @property
    def text(self) -> str:
        """Canonical text form used by the CLI and in report metadata."""
        inner = ",".join(f"{k}={v!r}" for k, v in self.params)
        return f"{self.family}:{inner}"

    def __str__(self) -> str:
        return self.text


def parse_sampler_spec(text: str) -> CopulaSamplerSpec:
    """Parse the canonical text form, e.g. ``gaussian:d=3,rho=0.5``."""
    head, _, tail = text.strip().partition(":")
    family = head.strip().lower()
    params = []
    if tail.strip():
        for item in tail.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"malformed parameter {item!r} in {text!r}")
            try:
                params.append((key.strip(), float(value)))
            except ValueError:
                raise ConfigError(f"non-numeric value in {item!r} of {text!r}")
    return CopulaSamplerSpec(family, tuple(params))


def draw_sample(spec: CopulaSamplerSpec, n: int, seed: int,
                stream: int = 0) -> np.ndarray:
    """Raw (n, d) sample from the family described by ``spec``."""
    p = dict(spec.params)
    fam = spec.family
    if fam == "independence":
        rng = _rng.stream(seed, _rng.DOMAIN_SAMPLER, stream)
        return rng.uniform(size=(n, p["d"]))
    if fam in ARCHIMEDEAN_FAMILIES:
        return sample_archimedean(fam, p["theta"], p["d"], n, seed, stream)
    if fam == "fm":
        return sample_frechet_mardia(p["p"], n, seed, stream)
    if fam == "gumbelid":
        return sample_gumbel_id_mixture(p["p"], p["theta"], n, seed, stream)
    if fam in ELLIPTICAL_FAMILIES:
        return sample_elliptical(fam, p["d"], p["rho"], n, seed, stream,
                                 nu=p.get("nu"))
    # gaussianpair: first two coordinates correlated, the rest independent
    corr = np.eye(p["d"])
    corr[0, 1] = corr[1, 0] = p["rho"]
    return sample_elliptical_corr("gaussian", corr, n, seed, stream)
