import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jsnet.errors import DegenerateSpacing, DomainError, FamilyMismatch
from jsnet.johnson import (
    ClassModel,
    FamilyTag,
    JohnsonParams,
    class_log_density,
    fit_percentile,
    g_eval,
    g_inverse,
    g_prime,
    inverse_transform,
    jacobian_logdet,
    normal_cdf,
    normalize_transform,
    percentile,
    percentile_quad,
)

from helpers import central_diff, exact_quantile_sample, random_params

TABLE_C1D1 = dict(gamma=-0.9, delta=0.9, lam=0.04, xi=0.15)

DOMAIN_GRIDS = {
    FamilyTag.SL: np.linspace(0.05, 5.0, 60),
    FamilyTag.SU: np.linspace(-8.0, 8.0, 60),
    FamilyTag.SB: np.linspace(0.02, 0.98, 60),
    FamilyTag.SN: np.linspace(-5.0, 5.0, 60),
}


class TestFamilyFunctions:
    def test_trivial_values(self):
        assert g_eval("SU", 0.0) == 0.0
        assert g_eval(FamilyTag.SN, 1.7) == 1.7
        assert g_eval("SU", math.sinh(1.0)) == pytest.approx(1.0, abs=1e-15)
        assert g_prime("SU", 0.0) == 1.0
        assert g_prime("SB", 0.5) == 4.0
        assert g_inverse("SU", 0.0) == 0.0
        assert g_inverse("SN", -2.5) == -2.5
        assert g_inverse("SL", 1.0) == pytest.approx(math.e, rel=1e-15)

    def test_su_matches_log_form(self):
        y = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(g_eval("SU", y), np.log(y + np.sqrt(y**2 + 1)), atol=1e-14)

    def test_su_prime_at_07_finite_difference(self):
        fd = (g_eval("SU", 0.7 + 1e-6) - g_eval("SU", 0.7 - 1e-6)) / 2e-6
        assert abs(g_prime("SU", 0.7) - fd) < 1e-8

    @pytest.mark.parametrize("family", list(FamilyTag))
    def test_prime_matches_central_difference(self, family):
        y = DOMAIN_GRIDS[family]
        h = 1e-6 * np.maximum(1.0, np.abs(y))
        h = np.minimum(h, 0.5 * np.minimum(np.abs(y), np.abs(1 - y))) if family is FamilyTag.SB else h
        fd = (g_eval(family, y + h) - g_eval(family, y - h)) / (2 * h)
        np.testing.assert_allclose(g_prime(family, y), fd, rtol=1e-7)

    @pytest.mark.parametrize("family", list(FamilyTag))
    def test_inverse_round_trip(self, family):
        u = np.linspace(-6, 6, 101)
        np.testing.assert_allclose(g_eval(family, g_inverse(family, u)), u, atol=1e-12)

    @pytest.mark.parametrize(
        "family, y", [("SL", 0.0), ("SL", -1.0), ("SB", 0.0), ("SB", 1.0), ("SB", 1.5), ("SU", np.nan)]
    )
    def test_domain_violation(self, family, y):
        with pytest.raises(DomainError) as info:
            g_eval(family, y)
        assert info.value.family == FamilyTag(family)
        with pytest.raises(DomainError):
            g_prime(family, y)


class TestTranslation:
    def test_identity_configuration(self):
        p = JohnsonParams([0.0], [1.0], [1.0], [0.0], FamilyTag.SN)
        np.testing.assert_array_equal(normalize_transform(p, [0.3]), [0.3])

    def test_table_point_at_location(self):
        p = JohnsonParams(**{k: [v] for k, v in TABLE_C1D1.items()})
        assert normalize_transform(p, [0.15])[0] == pytest.approx(-0.9, abs=1e-15)

    def test_inverse_trivial(self):
        p = JohnsonParams([0.0], [1.0], [2.0], [1.0])
        assert inverse_transform(p, [math.asinh(3.0)])[0] == pytest.approx(7.0, rel=1e-14)
        q = random_params(np.random.default_rng(3), 4)
        np.testing.assert_allclose(inverse_transform(q, q.gamma), q.xi, atol=1e-15)

    @pytest.mark.parametrize("family", list(FamilyTag))
    def test_round_trip_1000_points(self, family):
        rng = np.random.default_rng(11)
        p = random_params(rng, 3, family)
        y = rng.choice(DOMAIN_GRIDS[family], size=(1000, 3)) + rng.uniform(-1e-3, 1e-3, (1000, 3))
        if family is FamilyTag.SB:
            y = np.clip(y, 0.02, 0.98)
        if family is FamilyTag.SL:
            y = np.abs(y) + 0.01
        x = p.xi + p.lam * y
        back = inverse_transform(p, normalize_transform(p, x))
        np.testing.assert_allclose(back, x, rtol=0, atol=1e-10 * np.max(np.abs(x)))

    def test_round_trip_random_su_draws(self):
        rng = np.random.default_rng(5)
        p = JohnsonParams(**{k: [v] for k, v in TABLE_C1D1.items()})
        x = inverse_transform(p, rng.standard_normal((1000, 1)))
        np.testing.assert_allclose(inverse_transform(p, normalize_transform(p, x)), x, atol=1e-10)

    def test_domain_error_names_dimension(self):
        p = JohnsonParams([0, 0], [1, 1], [1, 1], [0, 0], FamilyTag.SB)
        with pytest.raises(DomainError) as info:
            normalize_transform(p, [0.5, 1.2])
        assert info.value.dimension == 1

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            JohnsonParams([0], [0.0], [1], [0])
        with pytest.raises(ValueError):
            JohnsonParams([0], [1], [-1.0], [0])
        with pytest.raises(ValueError):
            JohnsonParams([0, 1], [1], [1], [0])


class TestJacobian:
    def test_sn_unit_scale_is_zero(self):
        p = JohnsonParams([0.3, -1], [1, 1], [1, 1], [2, -2], FamilyTag.SN)
        assert jacobian_logdet(p, [5.0, -7.0]) == 0.0

    def test_table_at_location(self):
        p = JohnsonParams(**{k: [v] for k, v in TABLE_C1D1.items()})
        assert jacobian_logdet(p, [0.15]) == pytest.approx(math.log(22.5), rel=1e-14)

    @pytest.mark.parametrize("family", list(FamilyTag))
    def test_matches_finite_difference_determinant(self, family):
        rng = np.random.default_rng(21)
        p = random_params(rng, 3, family)
        for _ in range(5):
            y = rng.uniform(0.2, 0.8, 3) if family in (FamilyTag.SB, FamilyTag.SL) else rng.normal(size=3)
            x = p.xi + p.lam * y
            J = np.column_stack(
                [central_diff(lambda v: normalize_transform(p, v)[i], x, 1e-6 * p.lam.min()) for i in range(3)]
            ).T
            det = np.linalg.det(J)
            assert math.exp(jacobian_logdet(p, x)) == pytest.approx(det, rel=1e-5)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=2))
    def test_su_always_finite(self, x):
        p = JohnsonParams([0.1, -0.4], [0.7, 1.3], [0.04, 2.0], [0.15, -3.0])
        v = jacobian_logdet(p, x)
        assert math.isfinite(v) and math.exp(v) > 0


class TestClassDensity:
    def test_standard_normal_at_zero(self):
        m = ClassModel(JohnsonParams([0], [1], [1], [0], FamilyTag.SN), 1.0, [[1.0]])
        assert class_log_density(m, [0.0]) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-15)

    def test_integrates_to_one(self):
        p = JohnsonParams(**{k: [v] for k, v in TABLE_C1D1.items()})
        m = ClassModel(p, 1.0, [[1.0]])
        edges = np.linspace(-2000.0, 2000.0, 4_000_001)
        mid = 0.5 * (edges[1:] + edges[:-1])
        total = float(np.sum(np.exp(class_log_density(m, mid[:, None]))) * (edges[1] - edges[0]))
        assert total == pytest.approx(1.0, abs=1e-3)

    def test_monotone_in_z_norm_at_fixed_jacobian(self):
        # SN with unit scales has a constant Jacobian, so density orders by |z|^2
        rng = np.random.default_rng(2)
        p = JohnsonParams([0.2, -0.1], [1, 1], [1, 1], [0.3, 0.0], FamilyTag.SN)
        m = ClassModel(p, 0.5, np.eye(2))
        x = rng.normal(size=(200, 2))
        z2 = np.sum(normalize_transform(p, x) ** 2, axis=1)
        dens = class_log_density(m, x)
        order = np.argsort(z2)
        assert np.all(np.diff(dens[order]) <= 1e-12)

    def test_model_validation(self):
        p = JohnsonParams([0, 0], [1, 1], [1, 1], [0, 0])
        with pytest.raises(ValueError):
            ClassModel(p, 0.5, [[1, 0.2], [0.3, 1]])
        with pytest.raises(ValueError):
            ClassModel(p, 0.5, [[1, 2], [2, 1]])
        with pytest.raises(ValueError):
            ClassModel(p, 0.0, np.eye(2))
        m = ClassModel(p, 0.5, [[2.0, 0.5], [0.5, 1.0]])
        assert m.logdet_sigma == pytest.approx(-math.log(1.75), rel=1e-12)


class TestPercentile:
    def test_examples(self):
        assert percentile([1, 2, 3, 4, 5], 50) == 3
        assert percentile([1, 2, 3, 4, 5], 25) == 2
        assert percentile([10, 20], 75) == 17.5

    def test_normal_cdf(self):
        assert normal_cdf(0.0) == 0.5
        for z in (-3 * 0.524, -0.524, 0.524, 1.0, 3 * 0.524, -6.0):
            exact = float(mpmath.ncdf(mpmath.mpf(z)))
            assert normal_cdf(z) == pytest.approx(exact, rel=1e-15)

    def test_quad_ordering(self):
        rng = np.random.default_rng(0)
        q = percentile_quad(rng.normal(size=500), 0.524)
        assert q.x_m3z <= q.x_mz <= q.x_z <= q.x_3z
        assert q.m == q.x_3z - q.x_z and q.n == q.x_mz - q.x_m3z and q.p == q.x_z - q.x_mz


class TestFitPercentile:
    @pytest.mark.parametrize(
        "truth",
        [
            (-0.9, 0.9, 0.04, 0.15),
            (0.5, 0.8, 0.05, 0.7),
            (0.5, 0.8, 0.05, 0.5),
            (-0.5, 0.5, 0.01, 0.55),
            (-1.4, 1.0, 0.3, -1.5),
            (0.0, 2.5, 3.0, 10.0),
        ],
    )
    @pytest.mark.parametrize("z_param", [0.524, 0.3, 0.7])
    def test_exact_on_analytic_quantiles(self, truth, z_param):
        x = exact_quantile_sample(*truth, z_param=z_param)
        fit = fit_percentile(x, z_param)
        np.testing.assert_allclose(fit[:4], truth, rtol=1e-9, atol=1e-12)
        assert fit.family is FamilyTag.SU

    def test_monte_carlo_table_params(self):
        rng = np.random.default_rng(20240601)
        g, d, lam, xi = -0.9, 0.9, 0.04, 0.15
        x = xi + lam * np.sinh((rng.standard_normal(100_000) - g) / d)
        fit = fit_percentile(x)
        np.testing.assert_allclose(fit[:4], (g, d, lam, xi), rtol=0.05)

    def test_constant_samples(self):
        with pytest.raises(DegenerateSpacing):
            fit_percentile(np.full(50, 3.0))

    def test_family_mismatch_strict_and_lenient(self):
        # uniform data have light tails: mn/p^2 < 1
        x = np.linspace(0.0, 1.0, 401)
        with pytest.raises(FamilyMismatch):
            fit_percentile(x, strict=True)
        fit = fit_percentile(x, strict=False)
        assert fit.family is FamilyTag.SN
        assert (fit.gamma, fit.delta) == (0.0, 1.0)
        assert fit.xi == pytest.approx(0.5) and fit.lam == pytest.approx(np.std(x))

    @settings(max_examples=60, deadline=None)
    @given(
        a=st.floats(0.01, 100.0),
        b=st.floats(-100.0, 100.0),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_affine_equivariance(self, a, b, seed):
        rng = np.random.default_rng(seed)
        x = 0.3 + 0.2 * np.sinh((rng.standard_normal(400) + 0.4) / 0.8)
        base = fit_percentile(x)
        moved = fit_percentile(a * x + b)
        assert moved.gamma == pytest.approx(base.gamma, rel=1e-9, abs=1e-9)
        assert moved.delta == pytest.approx(base.delta, rel=1e-9)
        assert moved.lam == pytest.approx(a * base.lam, rel=1e-9)
        assert moved.xi == pytest.approx(a * base.xi + b, rel=1e-9, abs=1e-9 * max(1.0, abs(b), a * abs(base.xi)))
