"""Null tables, critical values, p-values, tests, and power estimation."""

import json
import math

import numpy as np
import pytest

from checkerdep import (
    ConfigError,
    DivisibilityError,
    DomainError,
    NullDistribution,
    StatisticKind,
    build_null,
    critical_value,
    estimate_power,
    p_value,
    test_independence as run_independence_test,
)
from checkerdep.metrics import ALL_KINDS
from checkerdep.montecarlo import _null_profiles


def synthetic_nd(values, kind="tv", d=2, n=36, seed=0):
    values = np.sort(np.asarray(values, dtype=float))
    return NullDistribution(StatisticKind(kind), d, n, len(values), seed, values)


class TestCriticalValue:
    def test_rank_arithmetic(self):
        nd = synthetic_nd(np.arange(10_000) / 10_000.0)
        # 9500th order statistic, 1-indexed
        assert critical_value(nd, 0.05) == nd.values[9499]
        assert critical_value(nd, 0.10) == nd.values[8999]
        assert critical_value(nd, 0.01) == nd.values[9899]

    def test_degenerate_table(self):
        nd = synthetic_nd(np.full(200, 3.25))
        for alpha in (0.01, 0.05, 0.10, 0.5, 0.99):
            assert critical_value(nd, alpha) == 3.25

    def test_monotone_in_alpha(self):
        nd = synthetic_nd(np.random.default_rng(0).random(1000))
        assert (critical_value(nd, 0.01) >= critical_value(nd, 0.05)
                >= critical_value(nd, 0.10))

    def test_alpha_domain(self):
        nd = synthetic_nd(np.arange(100.0))
        for bad in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(DomainError):
                critical_value(nd, bad)


class TestPValue:
    def test_observed_above_everything(self):
        nd = synthetic_nd(np.arange(9_999.0))
        assert p_value(nd, 1e9) == pytest.approx(1 / 10_000)

    def test_observed_at_minimum(self):
        nd = synthetic_nd(np.arange(1.0, 101.0))
        assert p_value(nd, 1.0) == 1.0

    def test_consistency_with_critical_value(self):
        # p < alpha implies rejection by the critical-value rule, up to ties
        # at the quantile order statistic (ties resolve to non-rejection)
        rng = np.random.default_rng(1)
        nd = synthetic_nd(np.round(rng.random(500), 2))
        for observed in np.round(rng.random(200), 3):
            for alpha in (0.05, 0.10, 0.25):
                if p_value(nd, observed) < alpha:
                    assert observed > critical_value(nd, alpha)


class TestBuildNull:
    def test_deterministic_across_worker_counts(self):
        a = build_null("tv", 2, 12, 400, seed=3, threads=1)
        _null_profiles.__globals__["_NULL_MEMO"].clear()
        b = build_null("tv", 2, 12, 400, seed=3, threads=3)
        np.testing.assert_array_equal(a.values, b.values)

    def test_requires_divisible_n(self):
        with pytest.raises(DivisibilityError):
            build_null("tv", 2, 35, 200, seed=0)

    def test_requires_enough_sims(self):
        with pytest.raises(ConfigError):
            build_null("tv", 2, 12, 50, seed=0)

    def test_median_decreases_with_n(self):
        meds = [float(np.median(build_null("tv", 2, n, 600, seed=4).values))
                for n in (36, 72, 144)]
        assert meds[0] > meds[1] > meds[2]
        assert meds[2] > 0

    def test_sup_is_heavily_discretized(self):
        nd = build_null("sup", 2, 36, 2_000, seed=5)
        assert np.unique(nd.values).size < nd.N / 10

    def test_all_kinds_nonnegative_and_sorted(self):
        for kind in ALL_KINDS:
            nd = build_null(kind, 3, 12, 300, seed=6)
            assert nd.values[0] >= 0
            assert np.all(np.diff(nd.values) >= 0)

    def test_lookup_methods_match_functions(self):
        nd = build_null("tv", 2, 12, 300, seed=19)
        assert nd.critical_value(0.05) == critical_value(nd, 0.05)
        assert nd.p_value(0.1) == p_value(nd, 0.1)

    def test_dimension_limit(self):
        with pytest.raises(DomainError):
            build_null("tv", 20, 12, 300, seed=0)


class TestCache:
    def test_round_trip(self, tmp_path):
        cache = str(tmp_path)
        a = build_null("tv", 2, 12, 200, seed=7, cache_dir=cache)
        files = sorted(p.name for p in tmp_path.glob("*.json"))
        assert len(files) == 4  # all four kinds stored from the shared draws
        _null_profiles.__globals__["_NULL_MEMO"].clear()
        b = build_null("tv", 2, 12, 200, seed=7, cache_dir=cache)
        np.testing.assert_array_equal(a.values, b.values)

    def test_key_mismatch_refused(self, tmp_path):
        cache = str(tmp_path)
        build_null("tv", 2, 12, 200, seed=8, cache_dir=cache)
        path = tmp_path / "null_tv_d2_n12_N200_seed8.json"
        doc = json.loads(path.read_text())
        doc["seed"] = 9  # stored key disagrees with the filename request
        path.write_text(json.dumps(doc))
        _null_profiles.__globals__["_NULL_MEMO"].clear()
        with pytest.warns(UserWarning, match="mismatched key"):
            nd = build_null("tv", 2, 12, 200, seed=8, cache_dir=cache)
        assert nd.N == 200

    def test_corrupted_cache_rebuilt(self, tmp_path):
        cache = str(tmp_path)
        a = build_null("kl", 2, 12, 200, seed=9, cache_dir=cache)
        path = tmp_path / "null_kl_d2_n12_N200_seed9.json"
        path.write_text("{ not json")
        _null_profiles.__globals__["_NULL_MEMO"].clear()
        with pytest.warns(UserWarning, match="corrupted"):
            b = build_null("kl", 2, 12, 200, seed=9, cache_dir=cache)
        np.testing.assert_array_equal(a.values, b.values)


class TestIndependenceTest:
    def test_comonotone_rejects_everywhere(self):
        x = np.linspace(0.0, 1.0, 36)
        report = run_independence_test(np.column_stack([x, x]), "tv",
                                   N=2_000, seed=10)
        assert all(report.decisions)
        assert report.p == pytest.approx(1 / 2_001)

    def test_divisibility_and_truncation(self):
        rng = np.random.default_rng(11)
        raw = rng.random((35, 2))
        with pytest.raises(DivisibilityError):
            run_independence_test(raw, "tv", N=200, seed=0)
        report = run_independence_test(raw, "tv", N=200, seed=0, truncate=True)
        assert report.observed.n == 30

    def test_decision_matches_invariant(self):
        rng = np.random.default_rng(12)
        report = run_independence_test(rng.random((36, 2)), "hellinger",
                                   N=500, seed=13)
        nd = build_null("hellinger", 2, 36, 500, seed=13)
        for alpha, crit, decision in zip(report.levels,
                                         report.critical_values,
                                         report.decisions):
            assert crit == critical_value(nd, alpha)
            assert decision == (report.observed.value > crit)


class TestPower:
    def test_independence_spec_has_size_alpha(self):
        est = estimate_power("independence:d=2", "tv", 36, 0.05,
                             N_null=2_000, R_alt=2_000, seed=14)
        se = math.sqrt(0.05 * 0.95 / 2_000)
        assert abs(est.power - 0.05) <= 3 * se

    def test_dependent_alternative_has_high_power(self):
        est = estimate_power("fm:p=0.5", "hellinger", 36, 0.05,
                             N_null=2_000, R_alt=300, seed=15)
        assert est.power >= 0.9

    def test_power_monotone_in_sample_size(self):
        kinds = {"gaussian:d=3,rho=0.3": "kl",
                 "clayton:theta=1,d=2": "tv",
                 "gumbel:theta=1.5,d=3": "hellinger"}
        for spec, kind in kinds.items():
            small = estimate_power(spec, kind, 60, 0.05,
                                   N_null=2_000, R_alt=400, seed=16)
            large = estimate_power(spec, kind, 216, 0.05,
                                   N_null=2_000, R_alt=400, seed=16)
            assert large.power + 2 * large.se >= small.power - 2 * small.se

    def test_se_formula(self):
        est = estimate_power("independence:d=2", "tv", 12, 0.05,
                             N_null=200, R_alt=100, seed=17)
        assert est.se == pytest.approx(
            math.sqrt(est.power * (1 - est.power) / 100)
        )


class TestSamplerLevelCalibration:
    # every sampler at an independence setting should reject at rate alpha
    @pytest.mark.parametrize("spec", ["independence:d=3",
                                      "gumbel:theta=1,d=2",
                                      "gaussian:d=2,rho=0"])
    def test_rejection_rate_is_alpha(self, spec):
        est = estimate_power(spec, "tv", 36, 0.05,
                             N_null=4_000, R_alt=2_000, seed=18)
        se = math.sqrt(0.05 * 0.95 / 2_000)
        assert abs(est.power - 0.05) <= 3 * se

    @pytest.mark.parametrize("kind", ["tv", "hellinger", "kl"])
    def test_large_shape_calibration(self, kind):
        # companion to the acceptance calibration cells (2,36) and (3,60)
        est = estimate_power("independence:d=3", kind, 216, 0.05,
                             N_null=10_000, R_alt=2_000, seed=11, threads=4)
        assert 0.035 <= est.power <= 0.065
