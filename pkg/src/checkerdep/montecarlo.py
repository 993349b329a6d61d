"""Null-distribution tables, critical values, tests, and power estimation.

Replications are independent work items: replication ``r`` derives all of
its randomness from ``(master seed, r)``, so tables and power estimates are
identical for any worker count and any execution order.  Null tables can be
cached to disk as self-describing JSON records keyed by
``(kind, d, n, N, seed)``; a record is refused (and rebuilt) on any key
mismatch or corruption.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels, _rng
from .errors import ConfigError, DivisibilityError, DomainError
from .estimator import pseudo_sample, truncate_to_multiple
from .metrics import (
    ALL_KINDS,
    MAX_DIMENSION,
    PROFILE_COLUMN,
    StatisticKind,
    StatisticValue,
    coerce_kind,
    eta_statistic,
)
from .samplers import (
    CopulaSamplerSpec,
    draw_sample,
    null_ranks,
    parse_sampler_spec,
)

CACHE_FORMAT = "checkerdep-null-table"
CACHE_VERSION = 1
_MIN_NULL_SIMS = 100


def _eta_from_ranks(ranks: np.ndarray) -> np.ndarray:
    # combined profile (order-2 + order-3) / 2, columns [tv, hellinger, kl, sup]
    prof = _kernels.eta_profile(ranks)
    return (prof[:4] + prof[4:]) / 2.0


def _ordinal_ranks(x: np.ndarray) -> np.ndarray:
    # sampler output is continuous, so ties have probability zero; any float
    # collision resolves by stable order
    n, d = x.shape
    order = np.argsort(x, axis=0, kind="stable")
    ranks = np.empty((n, d), dtype=np.int64)
    rng_col = np.arange(1, n + 1, dtype=np.int64)
    for j in range(d):
        ranks[order[:, j], j] = rng_col
    return ranks


def _null_chunk(args) -> np.ndarray:
    d, n, seed, start, stop = args
    out = np.empty((stop - start, 4))
    for r in range(start, stop):
        rng = _rng.stream(seed, _rng.DOMAIN_NULL, r)
        out[r - start] = _eta_from_ranks(null_ranks(d, n, rng))
    return out


def _alt_chunk(args) -> np.ndarray:
    spec_text, n, seed, start, stop = args
    spec = parse_sampler_spec(spec_text)
    out = np.empty((stop - start, 4))
    for r in range(start, stop):
        raw = draw_sample(spec, n, seed, stream=r)
        out[r - start] = _eta_from_ranks(_ordinal_ranks(raw))
    return out


def _run_replications(worker, static_args: tuple, total: int, threads: int) -> np.ndarray:
    threads = max(1, int(threads))
    # small jobs are not worth a pool; results are identical either way
    threads = min(threads, max(1, total // 256), os.cpu_count() or 1)
    if threads <= 1:
        return worker(static_args + (0, total))
    bounds = np.linspace(0, total, threads * 4 + 1, dtype=int)
    tasks = [static_args + (int(a), int(b))
             for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(worker, tasks))
    return np.vstack(parts)


_NULL_MEMO: dict[tuple, np.ndarray] = {}


def _null_profiles(d: int, n: int, N: int, seed: int, threads: int = 1) -> np.ndarray:
    key = (d, n, N, seed)
    hit = _NULL_MEMO.get(key)
    if hit is None:
        hit = _run_replications(_null_chunk, (d, n, seed), N, threads)
        hit.flags.writeable = False
        _NULL_MEMO[key] = hit
    return hit


@dataclass(frozen=True)
class NullDistribution:
    """Sorted Monte Carlo draws of a statistic under independence."""

    kind: StatisticKind
    d: int
    n: int
    N: int
    seed: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.N,) or np.any(np.diff(v) < 0) or v[0] < 0:
            raise ConfigError("null values must be N sorted nonnegative draws")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def critical_value(self, alpha: float) -> float:
        return critical_value(self, alpha)

    def p_value(self, observed: float) -> float:
        return p_value(self, observed)


def _cache_path(cache_dir: str, kind: StatisticKind, d: int, n: int,
                N: int, seed: int) -> str:
    return os.path.join(
        cache_dir, f"null_{kind.value}_d{d}_n{n}_N{N}_seed{seed}.json"
    )


def _cache_load(cache_dir: str, kind: StatisticKind, d: int, n: int,
                N: int, seed: int) -> np.ndarray | None:
    path = _cache_path(cache_dir, kind, d, n, N, seed)
    if not os.path.exists(path):
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        key = {"format": CACHE_FORMAT, "version": CACHE_VERSION,
               "kind": kind.value, "d": d, "n": n, "N": N, "seed": seed}
        if any(doc.get(k) != v for k, v in key.items()):
            warnings.warn(f"null-table cache {path} has a mismatched key; rebuilding")
            return None
        values = np.asarray(doc["values"], dtype=float)
        if values.shape != (N,):
            raise ValueError("wrong number of values")
        return values
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        warnings.warn(f"null-table cache {path} is corrupted ({exc}); rebuilding")
        return None


def _cache_store(cache_dir: str, kind: StatisticKind, d: int, n: int,
                 N: int, seed: int, values: np.ndarray) -> None:
    os.makedirs(cache_dir, exist_ok=True)
    doc = {"format": CACHE_FORMAT, "version": CACHE_VERSION,
           "kind": kind.value, "d": d, "n": n, "N": N, "seed": seed,
           "values": [float(v) for v in values]}
    path = _cache_path(cache_dir, kind, d, n, N, seed)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
    os.replace(tmp, path)


def build_null(kind: StatisticKind | str, d: int, n: int, N: int, seed: int,
               threads: int = 1, cache_dir: str | None = None) -> NullDistribution:
    """Monte Carlo null table of the statistic for shape (d, n).

    Replication ``r`` draws d independent rank permutations on stream ``r``
    and evaluates the statistic; all four statistic kinds are computed from
    the same draws, so tables for different kinds under one seed describe the
    same simulated samples.

    Parameters
    ----------
    kind : StatisticKind or str
    d, n : int
        Sample shape; ``n`` must be divisible by 6.
    N : int
        Number of replications, at least 100.
    seed : int
        Master seed; together with the parameters it fully determines the
        table, for any ``threads``.
    threads : int
        Worker processes for the replication loop.
    cache_dir : str, optional
        Directory for the JSON table cache.
    """
    kind = coerce_kind(kind)
    if n % 6 != 0:
        raise DivisibilityError(n, 6, f"sample size n={n} must be divisible by 6")
    if not 2 <= d <= MAX_DIMENSION:
        raise DomainError(f"need 2 <= d <= {MAX_DIMENSION}")
    if N < _MIN_NULL_SIMS:
        raise ConfigError(f"need at least {_MIN_NULL_SIMS} null replications, got {N}")
    if cache_dir is not None:
        cached = _cache_load(cache_dir, kind, d, n, N, seed)
        if cached is not None:
            return NullDistribution(kind, d, n, N, seed, cached)
    profiles = _null_profiles(d, n, N, seed, threads)
    if cache_dir is not None:
        for k in ALL_KINDS:
            _cache_store(cache_dir, k, d, n, N, seed,
                         np.sort(profiles[:, PROFILE_COLUMN[k]]))
    values = np.sort(profiles[:, PROFILE_COLUMN[kind]])
    return NullDistribution(kind, d, n, N, seed, values)


def critical_value(nd: NullDistribution, alpha: float) -> float:
    """Upper empirical quantile: the order statistic at rank
    ``ceil((1 - alpha) * N)``, 1-indexed."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    # guard against float noise bumping an exact product to the next integer
    rank = math.ceil((1.0 - alpha) * nd.N - 1e-9)
    rank = min(max(rank, 1), nd.N)
    return float(nd.values[rank - 1])


def p_value(nd: NullDistribution, observed: float) -> float:
    """Monte Carlo p-value with the add-one correction:
    ``(1 + #{draws >= observed}) / (N + 1)``."""
    count = nd.N - int(np.searchsorted(nd.values, observed, side="left"))
    return (1 + count) / (nd.N + 1)


@dataclass(frozen=True)
class TestReport:
    """Outcome of one independence test against a Monte Carlo null table."""

    observed: StatisticValue
    levels: tuple[float, ...]
    critical_values: tuple[float, ...]
    p: float
    decisions: tuple[bool, ...]
    null_sims: int
    seed: int

    def as_dict(self) -> dict:
        return {
            "stat": self.observed.kind.value,
            "observed": self.observed.value,
            "n": self.observed.n,
            "d": self.observed.d,
            "p_value": self.p,
            "null_sims": self.null_sims,
            "seed": self.seed,
            "by_level": [
                {"alpha": a, "critical": c, "reject": r}
                for a, c, r in zip(self.levels, self.critical_values, self.decisions)
            ],
        }


def _report_from_null(observed: StatisticValue, nd: NullDistribution,
                      levels) -> TestReport:
    levels = tuple(float(a) for a in levels)
    crits = tuple(critical_value(nd, a) for a in levels)
    # "exceeds the critical value": ties resolve to non-rejection
    decisions = tuple(observed.value > c for c in crits)
    return TestReport(observed=observed, levels=levels, critical_values=crits,
                      p=p_value(nd, observed.value), decisions=decisions,
                      null_sims=nd.N, seed=nd.seed)


def test_independence(raw, kind: StatisticKind | str,
                      levels=(0.10, 0.05, 0.01), N: int = 10_000,
                      seed: int = 0, tie_policy: str = "error",
                      truncate: bool = False, threads: int = 1,
                      cache_dir: str | None = None) -> TestReport:
    """Full test pipeline: rank transform, statistic, null table, decision.

    ``truncate=True`` opts into dropping ``n mod 6`` rows (chosen by a
    seeded draw) when the sample size is not a multiple of 6; the default is
    a hard :class:`DivisibilityError`.
    """
    raw = np.asarray(raw, dtype=float)
    if truncate:
        raw = truncate_to_multiple(raw, 6, seed)
    ps = pseudo_sample(raw, tie_policy=tie_policy, seed=seed)
    observed = eta_statistic(ps, kind)
    nd = build_null(observed.kind, ps.d, ps.n, N, seed,
                    threads=threads, cache_dir=cache_dir)
    return _report_from_null(observed, nd, levels)


@dataclass(frozen=True)
class PowerEstimate:
    """Estimated rejection rate of a test against one alternative."""

    spec: CopulaSamplerSpec
    kind: StatisticKind
    n: int
    alpha: float
    alt_sims: int
    rejections: int
    null_sims: int
    seed: int

    @property
    def power(self) -> float:
        return self.rejections / self.alt_sims

    @property
    def se(self) -> float:
        p = self.power
        return math.sqrt(p * (1.0 - p) / self.alt_sims)

    def as_dict(self) -> dict:
        return {
            "family": self.spec.family,
            "params": self.spec.text.partition(":")[2],
            "kind": self.kind.value,
            "n": self.n,
            "alpha": self.alpha,
            "power": self.power,
            "se": self.se,
            "rejections": self.rejections,
            "alt_sims": self.alt_sims,
            "null_sims": self.null_sims,
            "seed": self.seed,
        }


def estimate_power(spec: CopulaSamplerSpec | str, kind: StatisticKind | str,
                   n: int, alpha: float, N_null: int = 10_000,
                   R_alt: int = 1_000, seed: int = 0, threads: int = 1,
                   cache_dir: str | None = None) -> PowerEstimate:
    """Rejection rate over seeded draws from an alternative.

    One null table (shared by construction across calls with equal
    ``(kind, d, n, N_null, seed)``) is compared against ``R_alt``
    alternative samples, replication ``r`` drawing on sampler stream ``r``.
    """
    if isinstance(spec, str):
        spec = parse_sampler_spec(spec)
    kind = coerce_kind(kind)
    if R_alt < 1:
        raise ConfigError("need at least one alternative replication")
    nd = build_null(kind, spec.d, n, N_null, seed,
                    threads=threads, cache_dir=cache_dir)
    crit = critical_value(nd, alpha)
    profiles = _run_replications(_alt_chunk, (spec.text, n, seed), R_alt, threads)
    values = profiles[:, PROFILE_COLUMN[kind]]
    rejections = int((values > crit).sum())
    return PowerEstimate(spec=spec, kind=kind, n=n, alpha=float(alpha),
                         alt_sims=R_alt, rejections=rejections,
                         null_sims=N_null, seed=seed)
