import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfsm import HurstFunction, ParameterError, PathContext, UnsupportedKindError, eval_hurst, verify_modulus
from mfsm.hurst import eval_hurst_array, weierstrass_holder_exponent


def hf_constant(h=0.8):
    return HurstFunction(kind="constant", h_lo=h, h_hi=h)


def hf_weier(h_lo=0.75, h_hi=0.95, a=0.7, b=7.0, n_terms=8, amplitude=1.0):
    return HurstFunction(
        kind="rough_weierstrass", h_lo=h_lo, h_hi=h_hi,
        params={"a": a, "b": b, "n_terms": n_terms, "amplitude": amplitude},
    )


class TestEval:
    def test_constant(self):
        h = hf_constant(0.8)
        for x in (-3.0, 0.0, 0.5, 10.0):
            assert eval_hurst(h, x) == 0.8

    def test_weierstrass_zero_amplitude_is_midpoint(self):
        h = hf_weier(h_lo=0.7, h_hi=0.9, amplitude=0.0)
        for x in (-1.0, 0.0, 0.3):
            assert eval_hurst(h, x) == pytest.approx(0.8, abs=1e-15)

    def test_piecewise_linear_interpolation(self):
        h = HurstFunction(
            kind="piecewise_linear", h_lo=0.7, h_hi=0.9,
            params={"knots": [[0.0, 0.7], [1.0, 0.9]]},
        )
        assert eval_hurst(h, 0.5) == pytest.approx(0.8)  # hand arithmetic
        assert eval_hurst(h, -5.0) == 0.7  # constant extension
        assert eval_hurst(h, 5.0) == 0.9

    def test_smooth_catalog_fills_range(self):
        h = HurstFunction(kind="smooth_catalog", h_lo=0.6, h_hi=0.9, params={"frequency": 1.0})
        xs = np.linspace(0, 1, 4001)
        v = eval_hurst_array(h, xs)
        assert v.min() == pytest.approx(0.6, abs=1e-6)
        assert v.max() == pytest.approx(0.9, abs=1e-6)

    def test_deterministic_kinds_ignore_context(self):
        h = hf_weier()
        ctx = PathContext(accumulated_jump_sum=123.0)
        for x in (-0.4, 0.1, 0.9):
            assert eval_hurst(h, x, ctx) == eval_hurst(h, x)

    def test_adapted_uses_context(self):
        h = HurstFunction(
            kind="adapted_to_path", h_lo=0.6, h_hi=0.9,
            params={"map": "logistic", "map_scale": 1.0},
        )
        v0 = eval_hurst(h, 0.0, PathContext(0.0))
        v_pos = eval_hurst(h, 0.0, PathContext(10.0))
        v_neg = eval_hurst(h, 0.0, PathContext(-10.0))
        assert v0 == pytest.approx(0.75)
        assert v_neg < v0 < v_pos
        assert 0.6 <= v_neg and v_pos <= 0.9
        # no context behaves like a zero sum
        assert eval_hurst(h, 0.0) == v0

    @given(
        x=st.floats(-50, 50),
        lo=st.floats(0.05, 0.45),
        width=st.floats(0.0, 0.5),
        a=st.floats(0.1, 0.9),
        b=st.floats(1.5, 20.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_range_invariant(self, x, lo, width, a, b):
        hi = min(lo + width, 0.99)
        h = HurstFunction(
            kind="rough_weierstrass", h_lo=lo, h_hi=hi,
            params={"a": a, "b": b, "n_terms": 10},
        )
        v = eval_hurst(h, x)
        assert h.h_lo <= v <= h.h_hi

    @given(x=st.floats(-10, 10), s=st.floats(-100, 100))
    @settings(max_examples=100, deadline=None)
    def test_adapted_range_invariant(self, x, s):
        h = HurstFunction(kind="adapted_to_path", h_lo=0.6, h_hi=0.9, params={"map": "sine"})
        v = eval_hurst(h, x, PathContext(s))
        assert 0.6 <= v <= 0.9


class TestValidation:
    def test_constant_needs_equal_bounds(self):
        with pytest.raises(ParameterError):
            HurstFunction(kind="constant", h_lo=0.7, h_hi=0.8)

    def test_range_bounds(self):
        with pytest.raises(ParameterError):
            HurstFunction(kind="constant", h_lo=0.0, h_hi=0.0)
        with pytest.raises(ParameterError):
            HurstFunction(kind="constant", h_lo=1.0, h_hi=1.0)
        with pytest.raises(ParameterError):
            HurstFunction(kind="smooth_catalog", h_lo=0.9, h_hi=0.7)

    def test_unknown_kind(self):
        with pytest.raises(ParameterError):
            HurstFunction(kind="mystery", h_lo=0.5, h_hi=0.6)

    def test_knot_order(self):
        with pytest.raises(ParameterError):
            HurstFunction(
                kind="piecewise_linear", h_lo=0.5, h_hi=0.9,
                params={"knots": [[0.0, 0.6], [0.0, 0.7]]},
            )

    def test_round_trip(self):
        h = hf_weier()
        assert HurstFunction.from_dict(h.to_dict()) == h
        with pytest.raises(ParameterError):
            HurstFunction.from_dict({"kind": "constant", "h_lo": 0.5, "h_hi": 0.5, "bogus": 1})


class TestModulus:
    def test_constant_any_modulus(self):
        rep = verify_modulus(hf_constant(), ("holder", 0.5, 1e-9), 0.01, (0.0, 1.0))
        assert rep.holds and rep.worst_ratio == 0.0

    def test_piecewise_lipschitz(self):
        h = HurstFunction(
            kind="piecewise_linear", h_lo=0.7, h_hi=0.9,
            params={"knots": [[0.0, 0.7], [1.0, 0.9]]},
        )
        rep = verify_modulus(h, ("holder", 1.0, 0.2), 0.001, (0.0, 1.0))
        assert rep.holds
        assert rep.worst_ratio == pytest.approx(1.0, abs=1e-6)

    def test_weierstrass_violates_smoother_modulus(self):
        h = hf_weier(a=0.7, b=7.0, n_terms=10)
        rho_w = weierstrass_holder_exponent(h)
        assert rho_w == pytest.approx(math.log(1 / 0.7) / math.log(7.0))
        rep = verify_modulus(h, ("holder", min(1.0, rho_w + 0.4), 0.05), 1e-5, (0.0, 0.25))
        assert not rep.holds
        assert rep.worst_ratio > 1.0

    def test_weierstrass_satisfies_own_modulus(self):
        h = hf_weier(a=0.7, b=7.0, n_terms=10)
        rho_w = weierstrass_holder_exponent(h)
        rep = verify_modulus(h, ("holder", rho_w, 2.0), 1e-4, (0.0, 1.0))
        assert rep.holds

    def test_log_inverse_modulus(self):
        rep = verify_modulus(hf_constant(), ("log_inverse", 0.5), 0.01, (0.0, 2.0))
        assert rep.holds

    def test_adapted_rejected(self):
        h = HurstFunction(kind="adapted_to_path", h_lo=0.6, h_hi=0.9)
        with pytest.raises(UnsupportedKindError):
            verify_modulus(h, ("holder", 0.5, 1.0), 0.01, (0.0, 1.0))
