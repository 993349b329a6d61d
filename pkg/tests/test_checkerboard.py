"""Checkerboard approximation and the closed-form order-2 families."""

import itertools

import numpy as np
import pytest

from checkerdep import (
    AnalyticCopula,
    DomainError,
    NotACopulaError,
    checkerboard,
    clayton_copula,
    closed_form_c2_bivariate,
    closed_form_c2_trivariate,
    comonotone_copula,
    copula_box_volume,
    countermonotone_copula,
    frank_copula,
    frechet_mardia_copula,
    gumbel_copula,
    independence_copula,
    multilinear_eval,
)

ALPHAS = (0.0, 0.1, 0.25, 0.4, 0.5)
ALPHA0S = (0.0, 1 / 16, 1 / 8, 1 / 4)


def probe_grid(d, points=21):
    g = np.linspace(0.0, 1.0, points)
    mesh = np.meshgrid(*([g] * d), indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, d)


class TestAnalyticCopula:
    def test_rejects_non_copula_margins(self):
        with pytest.raises(NotACopulaError):
            AnalyticCopula(2, lambda p: p[..., 0] * p[..., 1] ** 2, name="bad")

    def test_rejects_bounds_violation(self):
        # exceeds min(u, v) in the interior
        with pytest.raises(NotACopulaError):
            AnalyticCopula(2, lambda p: np.minimum(p[..., 0], p[..., 1]) ** 0.5
                           * np.minimum(p[..., 0], p[..., 1]) ** 0.5
                           + 0.1 * np.sin(np.pi * p[..., 0])
                           * np.sin(np.pi * p[..., 1]), name="bad")

    def test_builtins_construct(self):
        independence_copula(4)
        comonotone_copula(3)
        countermonotone_copula()
        clayton_copula(2.0)
        gumbel_copula(3.0)
        frank_copula(5.0)
        frank_copula(-5.0)
        frechet_mardia_copula(0.5)

    def test_parameter_domains(self):
        with pytest.raises(DomainError):
            clayton_copula(0.0)
        with pytest.raises(DomainError):
            gumbel_copula(0.5)
        with pytest.raises(DomainError):
            frank_copula(0.0)
        with pytest.raises(DomainError):
            frechet_mardia_copula(1.5)


class TestCopulaBoxVolume:
    def test_product_boxes(self):
        pi2 = independence_copula(2)
        for b in itertools.product((1, 2), repeat=2):
            assert copula_box_volume(pi2, b, 2) == pytest.approx(0.25, abs=1e-15)

    def test_comonotone_off_diagonal(self):
        assert copula_box_volume(comonotone_copula(2), (1, 2), 2) == 0.0

    def test_volume_identity_of_bivariate_family(self):
        # box (1,2) at order 3 carries 1/9 for every parameter value
        for alpha in ALPHAS:
            cop = closed_form_c2_bivariate(alpha)
            assert copula_box_volume(cop, (1, 2), 3) == pytest.approx(
                1 / 9, abs=1e-12
            )

    def test_volumes_sum_to_one(self):
        cases = [independence_copula(2), independence_copula(3),
                 independence_copula(4), comonotone_copula(2),
                 comonotone_copula(3), countermonotone_copula(),
                 clayton_copula(2.0), gumbel_copula(2.0), frank_copula(3.0),
                 frechet_mardia_copula(0.3)]
        for cop in cases:
            for m in (2, 3):
                total = sum(
                    copula_box_volume(cop, b, m)
                    for b in itertools.product(range(1, m + 1), repeat=cop.d)
                )
                assert total == pytest.approx(1.0, abs=1e-12)


class TestCheckerboard:
    @pytest.mark.parametrize("d", [2, 3, 4])
    @pytest.mark.parametrize("m", [2, 3])
    def test_product_case(self, d, m):
        cb = checkerboard(independence_copula(d), m)
        pts = probe_grid(d)
        np.testing.assert_allclose(cb.cdf(pts), pts.prod(axis=1), atol=1e-12)
        np.testing.assert_allclose(cb.density.values, 1.0, atol=1e-12)

    def test_comonotone_grid_point(self):
        cb = checkerboard(comonotone_copula(2), 2)
        assert cb.cdf((0.5, 0.5)) == pytest.approx(0.5, abs=1e-15)

    def test_grid_restriction_matches_evaluator(self):
        cop = clayton_copula(2.0)
        cb = checkerboard(cop, 2)
        for idx in itertools.product(range(3), repeat=2):
            u = np.array(idx) / 2
            assert cb.cdf(u) == pytest.approx(float(cop(u)), abs=1e-12)

    def test_idempotent_on_own_class(self):
        cop = clayton_copula(2.0)
        once = checkerboard(cop, 3)
        twice = checkerboard(once.as_analytic(), 3)
        np.testing.assert_array_equal(
            once.grid.t, twice.grid.t
        )
        pts = np.random.default_rng(0).random((200, 2))
        np.testing.assert_allclose(once.cdf(pts), twice.cdf(pts), atol=1e-12)

    def test_density_matches_grid_volumes(self):
        from checkerdep import grid_box_volumes

        cb = checkerboard(gumbel_copula(2.5), 3)
        np.testing.assert_allclose(
            cb.density.values, grid_box_volumes(cb.grid) * 9, atol=1e-12
        )

    @pytest.mark.parametrize("cop_fn", [
        lambda: comonotone_copula(2),
        lambda: countermonotone_copula(),
        lambda: clayton_copula(3.0),
        lambda: frank_copula(4.0),
        lambda: comonotone_copula(3),
    ])
    @pytest.mark.parametrize("m", [2, 3])
    def test_uniform_approximation_bound(self, cop_fn, m):
        cop = cop_fn()
        cb = checkerboard(cop, m)
        pts = probe_grid(cop.d, points=51)
        err = np.abs(cb.cdf(pts) - cop(pts)).max()
        assert err <= cop.d / (2 * m) + 1e-12

    def test_pdf_lookup(self):
        cb = checkerboard(comonotone_copula(2), 2)
        assert cb.pdf((0.25, 0.25)) == pytest.approx(2.0, abs=1e-12)
        assert cb.pdf((0.25, 0.75)) == pytest.approx(0.0, abs=1e-12)


class TestBivariateClosedForm:
    def test_point_identity_order2(self):
        for alpha in ALPHAS:
            cop = closed_form_c2_bivariate(alpha)
            assert cop((0.25, 0.5)) == pytest.approx(alpha / 2, abs=1e-12)

    def test_point_identity_order3(self):
        for alpha in ALPHAS:
            cb3 = checkerboard(closed_form_c2_bivariate(alpha), 3)
            assert cb3.cdf((0.25, 0.5)) == pytest.approx(
                alpha / 3 + 1 / 24, abs=1e-12
            )

    def test_orders_coincide_only_at_quarter(self):
        for alpha in ALPHAS:
            gap = abs(alpha / 2 - (alpha / 3 + 1 / 24))
            assert gap == pytest.approx(abs(alpha / 6 - 1 / 24), abs=1e-12)
            cop = closed_form_c2_bivariate(alpha)
            cb3 = checkerboard(cop, 3)
            observed = abs(cop((0.25, 0.5)) - cb3.cdf((0.25, 0.5)))
            if alpha == 0.25:
                assert observed < 1e-12
            else:
                assert observed > 1e-6

    def test_quarter_is_product(self):
        cop = closed_form_c2_bivariate(0.25)
        pts = probe_grid(2, points=101)
        np.testing.assert_allclose(cop(pts), pts.prod(axis=1), atol=1e-12)

    def test_is_its_own_order2_checkerboard(self):
        for alpha in (0.0, 0.12, 0.5):
            cop = closed_form_c2_bivariate(alpha)
            cb = checkerboard(cop, 2)
            pts = np.random.default_rng(1).random((300, 2))
            np.testing.assert_allclose(cb.cdf(pts), cop(pts), atol=1e-12)

    def test_alpha_domain(self):
        with pytest.raises(DomainError):
            closed_form_c2_bivariate(-0.01)
        with pytest.raises(DomainError):
            closed_form_c2_bivariate(0.51)


class TestTrivariateClosedForm:
    def test_point_identity_order2(self):
        for a0 in ALPHA0S:
            cop = closed_form_c2_trivariate(a0)
            assert cop((0.25, 0.5, 0.5)) == pytest.approx(a0 / 2, abs=1e-12)

    def test_point_identity_order3(self):
        for a0 in ALPHA0S:
            cb3 = checkerboard(closed_form_c2_trivariate(a0), 3)
            assert cb3.cdf((0.25, 0.5, 0.5)) == pytest.approx(
                (2 / 9) * a0 + 5 / 144, abs=1e-12
            )

    def test_orders_coincide_only_at_eighth(self):
        for a0 in ALPHA0S:
            cop = closed_form_c2_trivariate(a0)
            cb3 = checkerboard(cop, 3)
            gap = abs(cop((0.25, 0.5, 0.5)) - cb3.cdf((0.25, 0.5, 0.5)))
            if a0 == 1 / 8:
                assert gap < 1e-12
            else:
                assert gap > 1e-6

    def test_eighth_is_product(self):
        cop = closed_form_c2_trivariate(1 / 8)
        pts = probe_grid(3, points=21)
        np.testing.assert_allclose(cop(pts), pts.prod(axis=1), atol=1e-12)

    def test_is_its_own_order2_checkerboard(self):
        for a0 in (0.0, 0.1, 0.25):
            cop = closed_form_c2_trivariate(a0)
            cb = checkerboard(cop, 2)
            pts = np.random.default_rng(2).random((300, 3))
            np.testing.assert_allclose(cb.cdf(pts), cop(pts), atol=1e-12)

    def test_alpha0_domain(self):
        with pytest.raises(DomainError):
            closed_form_c2_trivariate(-0.01)
        with pytest.raises(DomainError):
            closed_form_c2_trivariate(0.26)
