import math

import numpy as np
import pytest

import hawkpath as hp
from hawkpath.errors import DivergingKernelError, InfiniteVariationError, ParameterError
from hawkpath.kernels import (
    _abs_integral,
    _shift_profile,
    c_r,
    grid_coefficients,
    grid_projection_modulus,
    l1_norm,
    p_variation,
    shift_modulus,
)

from _oracles import dense_shift_modulus, quad_abs_l1, riemann_projection_modulus


class TestL1Norm:
    def test_zero_kernel(self):
        assert l1_norm(hp.zero_kernel(5.0)) == 0.0

    def test_exponential_closed_form(self):
        k = hp.exponential_kernel(1.0, 1.0, 5.0)
        assert l1_norm(k) == pytest.approx(1.0 - math.exp(-5.0), abs=1e-12)

    def test_cosine_decay_vs_quadrature_oracle(self, cos_kernel):
        oracle = quad_abs_l1(
            lambda t: 0.6 * math.cos(t) / (1 + t * t), 5.0,
            points=cos_kernel.nonsmooth_points,
        )
        # bypass metadata to exercise the quadrature path
        assert _abs_integral(cos_kernel, 0.0, 5.0) == pytest.approx(oracle, abs=1e-8)
        assert l1_norm(cos_kernel) == pytest.approx(oracle, abs=1e-8)

    def test_partial_horizon_uses_antiderivative(self):
        k = hp.exponential_kernel(2.0, 3.0, 5.0)
        assert l1_norm(k, 1.0) == pytest.approx(2.0 / 3.0 * (1 - math.exp(-3.0)), abs=1e-12)

    def test_nonintegrable_singularity_raises(self):
        bad = hp.custom_kernel(lambda t: 1.0 / np.asarray(t, dtype=float), 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            with pytest.raises(DivergingKernelError):
                l1_norm(bad)

    def test_horizon_precondition(self):
        with pytest.raises(ParameterError):
            l1_norm(hp.zero_kernel(5.0), 6.0)


class TestGridCoefficients:
    def test_zero_kernel(self):
        g = grid_coefficients(hp.zero_kernel(5.0), 0.5, 10)
        assert np.all(g.values == 0.0)

    def test_exponential_direct(self):
        g = grid_coefficients(hp.exponential_kernel(1.0, 1.0, 5.0), 1.0, 3)
        assert g.values == pytest.approx([math.exp(-1), math.exp(-2), math.exp(-3)])

    def test_inverse_sqrt_never_hits_zero(self):
        c = 0.3
        g = grid_coefficients(hp.inverse_sqrt_kernel(1.0, c), 0.25, 4)
        expected = [2 * c, c * math.sqrt(2), 2 * c / math.sqrt(3), c]
        assert g.values == pytest.approx(expected, rel=1e-12)
        assert np.all(np.isfinite(g.values))

    def test_values_match_evaluate_exactly(self, cos_kernel):
        g = grid_coefficients(cos_kernel, 0.25, 20)
        lags = 0.25 * np.arange(1, 21)
        assert np.array_equal(g.values, cos_kernel.evaluate(lags))

    def test_horizon_precondition(self):
        with pytest.raises(ParameterError):
            grid_coefficients(hp.zero_kernel(5.0), 0.5, 11)

    def test_averaged_coefficients_option(self):
        k = hp.exponential_kernel(1.0, 1.0, 5.0)
        g = grid_coefficients(k, 0.5, 4, averaged=True)
        expected = [
            (math.exp(-(j - 1) * 0.5) - math.exp(-j * 0.5)) / 0.5 for j in range(1, 5)
        ]
        assert g.values == pytest.approx(expected, abs=1e-9)
        # the singular family averages its first cell through the antiderivative
        gi = grid_coefficients(hp.inverse_sqrt_kernel(2.0, 0.1), 0.25, 4, averaged=True)
        assert gi.values[0] == pytest.approx(2 * 0.1 * math.sqrt(0.25) / 0.25, abs=1e-12)


class TestShiftModulus:
    def test_zero_kernel(self):
        assert shift_modulus(hp.zero_kernel(5.0), 0.1) == 0.0

    def test_inverse_sqrt_telescoping(self):
        c, T, d = 0.1, 2.0, 0.1
        k = hp.inverse_sqrt_kernel(T, c)
        # decreasing kernel: sup at eps = delta, difference of two integrals
        expected = 2 * c * (math.sqrt(T - d) - math.sqrt(T) + math.sqrt(d))
        got = shift_modulus(k, d, T)
        assert got == pytest.approx(expected, abs=1e-12)
        oracle = dense_shift_modulus(lambda t: c / math.sqrt(t), d, T)
        assert got == pytest.approx(oracle, abs=1e-6)
        assert got <= 2 * c * math.sqrt(d)  # square-root scaling

    def test_cosine_decay_vs_dense_grid_oracle(self, cos_kernel):
        d = 0.1
        got = shift_modulus(cos_kernel, d, 5.0)
        oracle = dense_shift_modulus(
            lambda t: 0.6 * math.cos(t) / (1 + t * t), d, 5.0,
            points=cos_kernel.nonsmooth_points,
        )
        assert got == pytest.approx(oracle, abs=1e-6)

    def test_monotone_kernel_maximizer_is_right_endpoint(self, exp_kernel):
        eps, vals = _shift_profile(exp_kernel, 0.2, 5.0, 33, 1e-9)
        assert int(np.argmax(vals)) == 32

    def test_log_slope_near_one_for_cosine_decay(self, cos_kernel):
        # bounded-variation kernels have a shift modulus linear in the step
        deltas = [0.2, 0.1, 0.05, 0.025]
        vals = [shift_modulus(cos_kernel, d, 5.0) for d in deltas]
        slope = np.polyfit(np.log(deltas), np.log(vals), 1)[0]
        assert 0.9 <= slope <= 1.1


class TestGridProjectionModulus:
    def test_constant_kernel(self):
        assert grid_projection_modulus(hp.constant_kernel(3.0, 5.0), 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_identity_kernel_triangle_areas(self):
        # h(t) = t on [0, 1], delta = 0.25: cells of [0, T - delta] each
        # contribute delta^2 / 2, three cells in total
        k = hp.custom_kernel(lambda t: np.asarray(t, dtype=float), 1.0)
        assert grid_projection_modulus(k, 0.25, 1.0) == pytest.approx(
            3 * 0.25**2 / 2, abs=1e-10
        )

    def test_cosine_decay_vs_riemann_oracle(self, cos_kernel):
        got = grid_projection_modulus(cos_kernel, 0.05, 5.0)
        oracle = riemann_projection_modulus(
            lambda t: 0.6 * np.cos(t) / (1 + t * t), 0.05, 5.0
        )
        assert got == pytest.approx(oracle, abs=1e-6)

    def test_vanishes_with_step(self, library_kernels):
        for k in library_kernels.values():
            assert grid_projection_modulus(k, 0.0125, 5.0) < grid_projection_modulus(
                k, 0.1, 5.0
            )


class TestRegularityConstant:
    def test_zero_kernel(self):
        assert c_r(hp.zero_kernel(5.0), 0.1) == 0.0

    def test_additivity_of_terms(self, exp_kernel):
        d = 0.1
        total = c_r(exp_kernel, d, 5.0)
        parts = (
            _abs_integral(exp_kernel, 0.0, d)
            + shift_modulus(exp_kernel, d, 5.0)
            + grid_projection_modulus(exp_kernel, d, 5.0)
        )
        assert total == pytest.approx(parts, abs=1e-12)

    def test_monotone_shrinkage_on_halving(self, cos_kernel):
        for d in (0.4, 0.2, 0.1):
            assert c_r(cos_kernel, d / 2, 5.0) <= c_r(cos_kernel, d, 5.0) + 1e-9

    def test_head_integral_monotone_in_delta(self, library_kernels):
        for k in library_kernels.values():
            assert _abs_integral(k, 0.0, 0.05) <= _abs_integral(k, 0.0, 0.1) + 1e-15


class TestPVariation:
    def test_constant_kernel(self):
        assert p_variation(hp.constant_kernel(2.0, 5.0), 1.0).value == 0.0

    def test_monotone_exponential(self):
        k = hp.exponential_kernel(1.0, 1.0, 5.0)
        res = p_variation(k, 1.0)
        assert res.exact
        assert res.value == pytest.approx(1.0 - math.exp(-5.0), abs=1e-12)

    def test_plain_cosine_total_variation(self):
        k = hp.custom_kernel(
            lambda t: np.cos(np.asarray(t, dtype=float)),
            2 * math.pi,
            sup_norm=1.0,
            monotone_breaks=(0.0, math.pi, 2 * math.pi),
        )
        res = p_variation(k, 1.0)
        assert res.exact
        assert res.value == pytest.approx(4.0, abs=1e-12)

    def test_dyadic_fallback_is_lower_bound(self):
        k = hp.custom_kernel(
            lambda t: np.cos(np.asarray(t, dtype=float)), 2 * math.pi, sup_norm=1.0
        )
        res = p_variation(k, 1.0)
        assert not res.exact
        assert res.value == pytest.approx(4.0, rel=1e-3)
        assert res.value <= 4.0 + 1e-9

    def test_p_above_one_flagged_lower_bound(self, cos_kernel):
        res = p_variation(cos_kernel, 2.0, 5.0)
        assert not res.exact
        assert res.value > 0.0

    def test_unbounded_family_rejected(self):
        with pytest.raises(InfiniteVariationError):
            p_variation(hp.inverse_sqrt_kernel(2.0, 0.1), 1.0)


class TestMetadataAgainstQuadrature:
    def test_l1_closed_forms(self):
        cases = [
            (hp.exponential_kernel(0.604, 1.0, 5.0), lambda t: 0.604 * math.exp(-t), ()),
            (
                hp.erlang_kernel(0.5, 2, 2.0, 5.0),
                lambda t: 0.5 * t * t * math.exp(-2 * t),
                (),
            ),
            (
                hp.compact_kernel(0.5, 1.0, 5.0),
                lambda t: 0.5 * max(1 - t, 0.0),
                (1.0,),
            ),
            (
                hp.inverse_sqrt_kernel(2.0, 0.1),
                lambda t: 0.1 / math.sqrt(t),
                (),
            ),
        ]
        for kernel, fn, pts in cases:
            oracle = quad_abs_l1(fn, kernel.horizon, points=pts)
            assert kernel.l1_closed_form == pytest.approx(oracle, rel=1e-6)

    def test_sup_norms(self, library_kernels):
        for k in library_kernels.values():
            ts = np.linspace(1e-9, k.horizon, 200001)
            assert k.sup_norm == pytest.approx(
                float(np.abs(k.evaluate(ts)).max()), rel=1e-6
            )

    def test_tabulated_kernel_interpolates(self):
        pts = [(0.0, 1.0), (1.0, 0.5), (2.0, 0.0)]
        k = hp.tabulated_kernel(pts, 2.0)
        assert float(k.evaluate(np.array([0.5]))[0]) == pytest.approx(0.75)
        assert k.sup_norm == 1.0
