import math

import numpy as np
import pytest
from scipy import stats

from mfsm import (
    DomainError,
    HurstFunction,
    JumpSet,
    ParameterError,
    ResourceCapError,
    RngStream,
    StableSpec,
    TruncationWindow,
    default_window,
    levy_unit_scale,
    path_from_jumps,
    riemann_oracle,
    sample_jumps,
    simulate_ensemble,
    truncation_error_bound,
)
from mfsm.kernel import kernel_sq_norm
from mfsm._accel import _superpose_fixed_np, _superpose_per_time_np, superpose_fixed, superpose_per_time


def hconst(v):
    return HurstFunction(kind="constant", h_lo=v, h_hi=v)


WINDOW = TruncationWindow(t0=-10.0, t_end=1.0, gamma=0.1)


class TestWindow:
    def test_rate_formula(self):
        # 2*(t_n - t_0)*gamma**(-alpha), t_0=-10, t_n=1, gamma=0.1, alpha=1.5
        assert WINDOW.rate(1.5) == pytest.approx(695.7011, abs=0.0001)

    def test_validation(self):
        with pytest.raises(ParameterError):
            TruncationWindow(1.0, 1.0, 0.1)
        with pytest.raises(ParameterError):
            TruncationWindow(0.0, 1.0, 0.0)


class TestSampleJumps:
    def test_atoms_in_window_sorted_and_large(self):
        js = sample_jumps(WINDOW, 1.5, RngStream(1, 0))
        assert len(js) > 0
        assert np.all(js.times > WINDOW.t0) and np.all(js.times <= WINDOW.t_end)
        assert np.all(np.diff(js.times) >= 0)
        assert np.all(np.abs(js.sizes) >= WINDOW.gamma)

    def test_huge_gamma_empties_the_window(self):
        w = TruncationWindow(-10.0, 1.0, 1e9)
        counts = [len(sample_jumps(w, 1.5, RngStream(2, i))) for i in range(50)]
        assert sum(counts) == 0

    def test_count_is_poisson_with_window_rate(self):
        w = TruncationWindow(-1.0, 1.0, 0.5)
        lam = w.rate(1.5)
        n = 10**4
        counts = np.array([len(sample_jumps(w, 1.5, RngStream(3, i))) for i in range(n)])
        assert abs(counts.mean() - lam) < 3 * math.sqrt(lam / n)
        # variance should also be near lam for a Poisson count
        assert counts.var() == pytest.approx(lam, rel=0.1)

    def test_size_law(self):
        w = TruncationWindow(-5.0, 1.0, 0.2)
        js = sample_jumps(TruncationWindow(-500.0, 1.0, 0.2), 1.3, RngStream(4, 0))
        mags = np.abs(js.sizes)
        p = 2.0**-1.3
        n = mags.size
        assert abs(np.mean(mags > 2 * w.gamma) - p) < 3 * math.sqrt(p * (1 - p) / n)
        signs = np.sign(js.sizes)
        assert abs(signs.mean()) < 3 / math.sqrt(n)

    def test_resource_cap(self):
        w = TruncationWindow(-1000.0, 1.0, 0.001)
        with pytest.raises(ResourceCapError, match="atom count"):
            sample_jumps(w, 1.9, RngStream(5, 0))

    def test_alpha_domain(self):
        with pytest.raises(ParameterError):
            sample_jumps(WINDOW, 2.0, RngStream(6, 0))

    def test_reproducible(self):
        a = sample_jumps(WINDOW, 1.5, RngStream(7, 3))
        b = sample_jumps(WINDOW, 1.5, RngStream(7, 3))
        assert np.array_equal(a.times, b.times) and np.array_equal(a.sizes, b.sizes)


class TestPathFromJumps:
    def test_empty_jumpset_gives_zero_path(self):
        js = JumpSet(np.empty(0), np.empty(0), WINDOW, 1.5)
        grid = np.linspace(-5, 1, 13)
        for mode, h in (("ito_msm", hconst(0.8)), ("classical_msm", hconst(0.8)), ("lfsm", hconst(0.8))):
            p = path_from_jumps(js, h, grid, mode)
            assert np.all(p.values == 0.0)

    def test_single_atom_arithmetic(self):
        # one atom (x=0.5, y=2), H=0.75, alpha=2, t=1 -> 2*0.5**0.25
        js = JumpSet(np.array([0.5]), np.array([2.0]), WINDOW, 2.0)
        p = path_from_jumps(js, hconst(0.75), np.array([1.0]), "ito_msm")
        assert p.values[0] == pytest.approx(1.6817928305074292, abs=1e-14)

    def test_zero_on_grid_is_exactly_zero(self):
        js = sample_jumps(WINDOW, 1.5, RngStream(8, 0))
        grid = np.array([-1.0, 0.0, 0.5, 1.0])
        for mode in ("ito_msm", "classical_msm"):
            p = path_from_jumps(js, hconst(0.8), grid, mode)
            assert p.values[1] == 0.0

    def test_matched_seed_constant_h_modes_identical_to_last_bit(self):
        js = sample_jumps(WINDOW, 1.5, RngStream(9, 0))
        grid = np.linspace(-2, 1, 301)
        x = path_from_jumps(js, hconst(0.8), grid, "ito_msm")
        y = path_from_jumps(js, hconst(0.8), grid, "classical_msm")
        z = path_from_jumps(js, hconst(0.8), grid, "lfsm")
        assert np.array_equal(x.values, y.values)
        assert np.array_equal(x.values, z.values)

    def test_modes_differ_for_varying_h(self):
        js = sample_jumps(WINDOW, 1.5, RngStream(10, 0))
        h = HurstFunction(kind="smooth_catalog", h_lo=0.75, h_hi=0.95)
        grid = np.linspace(0.1, 1, 64)
        x = path_from_jumps(js, h, grid, "ito_msm")
        y = path_from_jumps(js, h, grid, "classical_msm")
        assert not np.allclose(x.values, y.values)

    def test_negating_sizes_negates_path(self):
        js = sample_jumps(WINDOW, 1.5, RngStream(11, 0))
        grid = np.linspace(-2, 1, 50)
        p = path_from_jumps(js, hconst(0.8), grid, "ito_msm")
        neg = JumpSet(js.times, -js.sizes, js.window, js.stable_alpha)
        q = path_from_jumps(neg, hconst(0.8), grid, "ito_msm")
        assert np.array_equal(p.values, -q.values)

    def test_adapted_mode_uses_strictly_earlier_atoms(self):
        from mfsm import PathContext, eval_hurst
        from mfsm.kernel import KernelPoint, eval_kernel

        h = HurstFunction(kind="adapted_to_path", h_lo=0.6, h_hi=0.9,
                          params={"map": "logistic", "map_scale": 0.5})
        times = np.array([-1.0, 0.2, 0.6])
        sizes = np.array([2.0, -3.0, 1.5])
        js = JumpSet(times, sizes, WINDOW, 1.5)
        t = 1.0
        csums = [0.0, 2.0, -1.0]
        want = sum(
            y * eval_kernel(KernelPoint(t=t, x=x, h_at_x=eval_hurst(h, x, PathContext(s)), alpha=1.5))
            for x, y, s in zip(times, sizes, csums)
        )
        got = path_from_jumps(js, h, np.array([t]), "ito_msm").values[0]
        assert got == pytest.approx(want, rel=1e-13)

    def test_grid_domain_errors(self):
        js = sample_jumps(WINDOW, 1.5, RngStream(12, 0))
        with pytest.raises(DomainError, match="window start"):
            path_from_jumps(js, hconst(0.8), np.array([-10.0, 0.5]), "ito_msm")
        with pytest.raises(DomainError, match="t_end"):
            path_from_jumps(js, hconst(0.8), np.array([0.5, 1.5]), "ito_msm")

    def test_mode_constraints(self):
        js = sample_jumps(WINDOW, 1.5, RngStream(13, 0))
        varying = HurstFunction(kind="smooth_catalog", h_lo=0.7, h_hi=0.9)
        adapted = HurstFunction(kind="adapted_to_path", h_lo=0.7, h_hi=0.9)
        with pytest.raises(DomainError):
            path_from_jumps(js, varying, np.array([0.5]), "lfsm")
        with pytest.raises(DomainError):
            path_from_jumps(js, adapted, np.array([0.5]), "classical_msm")

    def test_backends_agree(self):
        js = sample_jumps(WINDOW, 1.5, RngStream(14, 0))
        grid = np.linspace(-3, 1, 41)
        exps = np.full(len(js), 0.8 - 1 / 1.5)
        fast = superpose_fixed(grid, js.times, js.sizes, exps)
        slow = _superpose_fixed_np(grid, js.times, js.sizes, exps)
        assert np.allclose(fast, slow, rtol=1e-12, atol=1e-12)
        e_t = np.linspace(0.7, 0.9, grid.size) - 1 / 1.5
        fast = superpose_per_time(grid, e_t, js.times, js.sizes)
        slow = _superpose_per_time_np(grid, e_t, js.times, js.sizes)
        assert np.allclose(fast, slow, rtol=1e-12, atol=1e-12)

    def test_symmetry_in_distribution(self):
        vals = np.array([
            path_from_jumps(
                sample_jumps(TruncationWindow(-5.0, 1.0, 0.05), 1.5, RngStream(15, i)),
                hconst(0.8), np.array([1.0]), "lfsm",
            ).values[0]
            for i in range(2000)
        ])
        _, p = stats.ks_2samp(vals, -vals)
        assert p > 0.01


class TestRiemannOracle:
    def test_zero_time(self):
        p = riemann_oracle(np.array([0.0, 1.0]), hconst(0.8), StableSpec(1.5, 1.0), -10.0, 0.01, RngStream(16, 0))
        assert p.values[0] == 0.0

    def test_gaussian_variance(self):
        # alpha=2: marginal at t=1 is centered Gaussian with variance
        # 2 * integral of F_1(x)^2 over the truncated window (quadrature oracle)
        t0, step, n = -20.0, 0.01, 10**4
        h = hconst(0.75)
        want = 2.0 * kernel_sq_norm(1.0, t0, h, 2.0)
        vals = np.array([
            riemann_oracle(np.array([1.0]), h, StableSpec(2.0, 1.0), t0, step, RngStream(17, i)).values[0]
            for i in range(n)
        ])
        assert vals.mean() == pytest.approx(0.0, abs=3 * math.sqrt(want / n))
        assert vals.var() == pytest.approx(want, rel=0.05)

    def test_min_cells_enforced(self):
        with pytest.raises(ParameterError, match="cells"):
            riemann_oracle(np.array([1.0]), hconst(0.8), StableSpec(1.5, 1.0), -2.0, 0.01, RngStream(18, 0))

    def test_deterministic_hurst_required(self):
        adapted = HurstFunction(kind="adapted_to_path", h_lo=0.7, h_hi=0.9)
        with pytest.raises(DomainError):
            riemann_oracle(np.array([1.0]), adapted, StableSpec(1.5, 1.0), -10.0, 0.01, RngStream(19, 0))

    def test_oracle_vs_jump_representation_smoke(self):
        # reduced-size check of the big-jump/oracle law equivalence at alpha=1.5
        alpha, hv, n = 1.5, 0.8, 800
        w = TruncationWindow(-3.0, 1.0, 0.005)
        jump_vals = np.array([
            path_from_jumps(sample_jumps(w, alpha, RngStream(20, i)), hconst(hv), np.array([1.0]), "lfsm").values[0]
            for i in range(n)
        ])
        spec = StableSpec(alpha, levy_unit_scale(alpha))
        oracle_vals = np.array([
            riemann_oracle(np.array([1.0]), hconst(hv), spec, w.t0, 0.004, RngStream(21, i)).values[0]
            for i in range(n)
        ])
        _, p = stats.ks_2samp(jump_vals, oracle_vals)
        assert p > 0.01


class TestTruncationError:
    def test_small_jump_second_moment_arithmetic(self):
        # integral of y^2 over (-gamma, gamma) against the jump intensity:
        # 2*alpha*gamma**(2-alpha)/(2-alpha) = 1.89737 at alpha=1.5, gamma=0.1
        h = hconst(0.8)
        b = truncation_error_bound(WINDOW, 1.0, h, 1.5)
        sq = max(
            kernel_sq_norm(1.0, WINDOW.t0, h, 1.5),
            kernel_sq_norm(1.0, WINDOW.t0, hconst(0.8), 1.5),
        )
        assert b.small_jump_l2 / sq == pytest.approx(1.8973666, rel=1e-6)

    def test_small_jump_rate_in_gamma(self):
        h, alpha = hconst(0.8), 1.5
        gammas = 2.0 ** -np.arange(3, 9)
        vals = [
            truncation_error_bound(TruncationWindow(-10.0, 1.0, g), 1.0, h, alpha).small_jump_l2
            for g in gammas
        ]
        slope = np.polyfit(np.log(gammas), np.log(vals), 1)[0]
        assert abs(slope - (2 - alpha)) < 0.05

    def test_far_past_vanishes_with_deep_t0(self):
        h, alpha = hconst(0.8), 1.5
        vals = [
            truncation_error_bound(TruncationWindow(t0, 1.0, 0.1), 1.0, h, alpha).far_past_lambda_alpha
            for t0 in (-10.0, -100.0, -1000.0)
        ]
        assert vals[0] > vals[1] > vals[2]
        # tail mass decays like |t0|**(alpha*(H-1)) = |t0|**(-0.3)
        assert vals[2] / vals[0] == pytest.approx(100.0**-0.3, rel=0.1)


class TestEnsembleAndDefaults:
    def test_default_window_caps_and_spans(self):
        grid = np.linspace(0, 1, 11)
        w = default_window(grid, 1.5, hconst(0.8))
        assert w.t0 == pytest.approx(-10.0)
        assert w.t_end == 1.0
        assert w.rate(1.5) <= 10**8

    def test_ensemble_thread_count_invariance(self):
        grid = np.linspace(0.1, 1, 17)
        w = TruncationWindow(-5.0, 1.0, 0.1)
        a = simulate_ensemble(w, 1.5, hconst(0.8), grid, "lfsm", 6, seed=77, threads=1)
        b = simulate_ensemble(w, 1.5, hconst(0.8), grid, "lfsm", 6, seed=77, threads=3)
        for pa, pb in zip(a, b):
            assert np.array_equal(pa.values, pb.values)

    def test_provenance_recorded(self):
        grid = np.linspace(0.1, 1, 5)
        w = TruncationWindow(-5.0, 1.0, 0.1)
        (p,) = simulate_ensemble(w, 1.5, hconst(0.8), grid, "ito_msm", 1, seed=42)
        assert p.provenance["seed"] == 42
        assert p.provenance["stream_id"] == 0
        assert p.provenance["mode"] == "ito_msm"
        assert p.provenance["window"]["gamma"] == 0.1
        assert p.provenance["hurst"]["kind"] == "constant"
