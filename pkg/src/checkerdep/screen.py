"""Pairwise screening of a hypothesized independence decomposition.

The hypothesis splits coordinates into two groups, each believed internally
dependent along a stated chain, with the groups believed mutually
independent.  Dependence along every consecutive chain pair makes a group
exhaustively dependent, and independence of all cross-group pairs supports
independence of the groups; every test here is bivariate, so the procedure
stays fast even for large samples.  No multiplicity correction is applied:
the per-test level is reported verbatim along with the total test count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _rng
from .errors import ConfigError
from .estimator import pseudo_sample
from .metrics import StatisticKind, coerce_kind, eta_statistic
from .montecarlo import TestReport, _report_from_null, build_null


@dataclass(frozen=True)
class PartitionHypothesis:
    """Two disjoint coordinate groups with a dependence chain through each.

    Indices are 0-based columns of the data matrix.  A chain defaults to its
    group's stated order and must be a permutation of the group.
    """

    d: int
    group1: tuple[int, ...]
    group2: tuple[int, ...]
    chain1: tuple[int, ...] = ()
    chain2: tuple[int, ...] = ()

    def __post_init__(self):
        g1, g2 = tuple(self.group1), tuple(self.group2)
        if not g1 or not g2:
            raise ConfigError("both groups must be nonempty")
        if set(g1) & set(g2):
            raise ConfigError("groups must be disjoint")
        for idx in (*g1, *g2):
            if not 0 <= idx < self.d:
                raise ConfigError(f"column index {idx} outside 0..{self.d - 1}")
        if len(set(g1)) != len(g1) or len(set(g2)) != len(g2):
            raise ConfigError("groups must not repeat columns")
        c1 = tuple(self.chain1) or g1
        c2 = tuple(self.chain2) or g2
        if sorted(c1) != sorted(g1) or sorted(c2) != sorted(g2):
            raise ConfigError("each chain must be a permutation of its group")
        object.__setattr__(self, "group1", g1)
        object.__setattr__(self, "group2", g2)
        object.__setattr__(self, "chain1", c1)
        object.__setattr__(self, "chain2", c2)

    def pairs(self) -> list[tuple[str, tuple[int, int]]]:
        """All tests to run: chain pairs per group, then all cross pairs."""
        out = [("within-1", (a, b)) for a, b in zip(self.chain1, self.chain1[1:])]
        out += [("within-2", (a, b)) for a, b in zip(self.chain2, self.chain2[1:])]
        out += [("cross", (a, b)) for a in self.group1 for b in self.group2]
        return out


@dataclass(frozen=True)
class PairDecision:
    role: str
    pair: tuple[int, int]
    report: TestReport

    @property
    def reject(self) -> bool:
        return self.report.decisions[0]


@dataclass(frozen=True)
class ScreenReport:
    """Per-pair test outcomes plus the overall consistency verdict.

    Consistent means every within-group pair rejected independence and no
    cross-group pair did; any other outcome names the offending pairs.
    """

    hypothesis: PartitionHypothesis
    kind: StatisticKind
    alpha: float
    pairs: tuple[PairDecision, ...]
    consistent: bool
    reasons: tuple[str, ...]

    @property
    def verdict(self) -> str:
        return "consistent" if self.consistent else "inconsistent"


def screen_partition(raw, hyp: PartitionHypothesis, kind: StatisticKind | str,
                     alpha: float = 0.05, N: int = 10_000, seed: int = 0,
                     tie_policy: str = "error", threads: int = 1,
                     cache_dir: str | None = None) -> ScreenReport:
    """Run all pairwise tests implied by the hypothesis and form a verdict.

    All pairs share one null table (every test is bivariate with the same
    ``n``); tie-breaking randomness, when enabled, is derived per pair from
    ``(seed, pair index)`` so pairs are exchangeable and reproducible.
    """
    kind = coerce_kind(kind)
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2 or raw.shape[1] != hyp.d:
        raise ConfigError(
            f"data has {raw.shape[1] if raw.ndim == 2 else '?'} columns, "
            f"hypothesis expects {hyp.d}"
        )
    n = raw.shape[0]
    nd = build_null(kind, 2, n, N, seed, threads=threads, cache_dir=cache_dir)
    decisions = []
    reasons = []
    for k, (role, (a, b)) in enumerate(hyp.pairs()):
        pair_seed = _rng.derive_seed(seed, _rng.DOMAIN_PAIR, k)
        ps = pseudo_sample(raw[:, [a, b]], tie_policy=tie_policy, seed=pair_seed)
        observed = eta_statistic(ps, kind)
        report = _report_from_null(observed, nd, (alpha,))
        dec = PairDecision(role=role, pair=(a, b), report=report)
        decisions.append(dec)
        if role.startswith("within") and not dec.reject:
            reasons.append(
                f"within-group pair ({a}, {b}) did not reject independence"
            )
        if role == "cross" and dec.reject:
            reasons.append(f"cross-group pair ({a}, {b}) rejected independence")
    return ScreenReport(hypothesis=hyp, kind=kind, alpha=float(alpha),
                        pairs=tuple(decisions), consistent=not reasons,
                        reasons=tuple(reasons))
