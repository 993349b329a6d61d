"""Pseudo-samples, frequency tensors, and the sample copula objects."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from checkerdep import (
    DivisibilityError,
    DomainError,
    TiesPresentError,
    frequency_tensor,
    grid_box_volume,
    pseudo_sample,
    sample_copula_density,
    subcopula_grid,
    truncate_to_multiple,
)


def comonotone_ps(n=6):
    return pseudo_sample(np.column_stack([np.arange(n)] * 2) / n + 1 / n)


class TestPseudoSample:
    def test_rank_arithmetic(self):
        ps = pseudo_sample([(3.2, 1.1), (1.0, 5.5), (2.0, 2.2)])
        expected = np.array([[3, 1], [1, 3], [2, 2]])
        np.testing.assert_array_equal(ps.ranks, expected)
        np.testing.assert_allclose(
            ps.points, np.array([[1, 1 / 3], [1 / 3, 1], [2 / 3, 2 / 3]])
        )

    def test_single_row(self):
        ps = pseudo_sample([(5.0, -2.0, 7.0)])
        np.testing.assert_array_equal(ps.points, [[1.0, 1.0, 1.0]])

    def test_ties_error_names_column(self):
        with pytest.raises(TiesPresentError) as err:
            pseudo_sample([(5.0, 5.0), (5.0, 7.0)])
        assert err.value.column == 0

    def test_ties_random_break_is_seeded(self):
        raw = [(5.0, 1.0), (5.0, 2.0), (5.0, 3.0), (1.0, 4.0)]
        a = pseudo_sample(raw, tie_policy="random", seed=42)
        b = pseudo_sample(raw, tie_policy="random", seed=42)
        np.testing.assert_array_equal(a.ranks, b.ranks)
        # ties in column 0 must still produce a valid permutation
        assert sorted(a.ranks[:, 0]) == [1, 2, 3, 4]
        assert a.ranks[3, 0] == 1  # the untied smallest value keeps rank 1

    def test_random_break_requires_seed(self):
        with pytest.raises(DomainError):
            pseudo_sample([(1.0, 2.0), (2.0, 1.0)], tie_policy="random")

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            pseudo_sample([(1.0, np.nan), (2.0, 1.0)])

    @given(st.integers(2, 30))
    @settings(max_examples=30, deadline=None)
    def test_invariant_under_monotone_transform(self, n):
        rng = np.random.default_rng(n)
        raw = rng.normal(size=(n, 3))
        a = pseudo_sample(raw)
        b = pseudo_sample(raw**3)  # strictly increasing on all reals
        np.testing.assert_array_equal(a.ranks, b.ranks)


class TestFrequencyTensor:
    def test_comonotone_m2(self):
        s = frequency_tensor(comonotone_ps(), 2).s
        np.testing.assert_allclose(s, [[0.5, 0.0], [0.0, 0.5]])

    def test_comonotone_m3(self):
        s = frequency_tensor(comonotone_ps(), 3).s
        np.testing.assert_allclose(s, np.diag([1 / 3, 1 / 3, 1 / 3]))

    def test_divisibility_error(self):
        ps = pseudo_sample(np.random.default_rng(0).random((10, 2)))
        with pytest.raises(DivisibilityError):
            frequency_tensor(ps, 3)

    def test_marginal_slabs_exact(self):
        rng = np.random.default_rng(1)
        ps = pseudo_sample(rng.random((24, 3)))
        for m in (2, 3):
            freq = frequency_tensor(ps, m)
            for axis in range(3):
                axes = tuple(a for a in range(3) if a != axis)
                np.testing.assert_array_equal(
                    freq.counts.sum(axis=axes), [24 // m] * m
                )

    def test_uniform_inputs_have_uniform_expectation(self):
        # mean of one fixed entry over many replications approaches m^-d
        rng = np.random.default_rng(2)
        reps = 10_000
        vals = np.empty(reps)
        for r in range(reps):
            ps = pseudo_sample(rng.random((12, 2)))
            vals[r] = frequency_tensor(ps, 2).s[0, 0]
        se = vals.std(ddof=1) / np.sqrt(reps)
        assert abs(vals.mean() - 0.25) < 4 * se


class TestSubcopulaGrid:
    def test_comonotone_cumulative_values(self):
        t = subcopula_grid(frequency_tensor(comonotone_ps(), 2)).t
        assert t[1, 1] == 0.5 and t[1, 2] == 0.5 and t[2, 1] == 0.5
        assert t[2, 2] == 1.0

    def test_uniform_tensor_gives_product_grid(self):
        # a 6x6 lattice fills every box of both small partitions evenly, no
        # matter how the within-column ties are broken
        raw = np.array([(i, j) for i in range(1, 7) for j in range(1, 7)], float)
        ps = pseudo_sample(raw, tie_policy="random", seed=9)
        for m in (2, 3):
            grid = subcopula_grid(frequency_tensor(ps, m))
            axis = np.arange(m + 1) / m
            np.testing.assert_allclose(grid.t, np.multiply.outer(axis, axis))

    def test_round_trip_volume_equals_frequency(self):
        rng = np.random.default_rng(4)
        ps = pseudo_sample(rng.random((36, 3)))
        for m in (2, 3):
            freq = frequency_tensor(ps, m)
            grid = subcopula_grid(freq)
            for b, s in np.ndenumerate(freq.s):
                box = tuple(i + 1 for i in b)
                assert grid_box_volume(grid, box) == s  # exact, via counts

    def test_corner_is_one(self):
        ps = pseudo_sample(np.random.default_rng(5).random((12, 2)))
        grid = subcopula_grid(frequency_tensor(ps, 3))
        assert grid.t[3, 3] == 1.0


class TestSampleCopulaDensity:
    def test_comonotone_density(self):
        dens = sample_copula_density(frequency_tensor(comonotone_ps(), 2))
        np.testing.assert_allclose(dens.values, [[2.0, 0.0], [0.0, 2.0]])

    def test_uniform_density(self):
        raw = np.array([(i, j) for i in range(1, 7) for j in range(1, 7)], float)
        ps = pseudo_sample(raw, tie_policy="random", seed=10)
        for m in (2, 3):
            dens = sample_copula_density(frequency_tensor(ps, m))
            np.testing.assert_allclose(dens.values, 1.0)

    def test_single_box_mass_violates_margins(self):
        # a frequency tensor with all mass in one box cannot come from ranks
        # (marginal slabs are exact), and the constructor rejects it
        from checkerdep import FrequencyTensor

        with pytest.raises(DomainError):
            FrequencyTensor(np.array([[6, 0], [0, 0]]), 6)


class TestTruncation:
    def test_no_drop_when_divisible(self):
        raw = np.arange(24.0).reshape(12, 2)
        np.testing.assert_array_equal(truncate_to_multiple(raw, 6, seed=0), raw)

    def test_drops_to_multiple_and_is_seeded(self):
        raw = np.random.default_rng(7).random((35, 2))
        a = truncate_to_multiple(raw, 6, seed=1)
        b = truncate_to_multiple(raw, 6, seed=1)
        assert a.shape == (30, 2)
        np.testing.assert_array_equal(a, b)
        # kept rows preserve original order
        idx = [np.flatnonzero((raw == row).all(axis=1))[0] for row in a]
        assert idx == sorted(idx)
