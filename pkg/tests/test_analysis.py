import numpy as np
import pytest

from sparseqi.analysis import (
    DegenerateFit,
    FieldDifference,
    NormSpec,
    ResolutionTooLow,
    besov_block_norm,
    difference,
    fit_rate,
    lp_block_norm,
    lq_norm,
    recovery_error,
    sobolev_norm_fourier,
)
from sparseqi.quasi_interp import HierCoeffs, decompose
from sparseqi.testfuncs import random_mixed_smooth


class TestLqNorm:
    def test_zero(self):
        assert lq_norm(lambda x: 0.0 * x, 2.0, 1, 64) == 0.0

    def test_unit_constant(self):
        for q in (1.5, 2.0, 4.0, np.inf):
            assert lq_norm(lambda x: np.ones_like(x), q, 1, 64) == pytest.approx(1.0)

    def test_sine_closed_form(self):
        val = lq_norm(lambda x: np.sin(2 * np.pi * x), 2.0, 1, 2**12)
        assert val == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-10)

    def test_resolution_guard(self):
        with pytest.raises(ResolutionTooLow):
            lq_norm(lambda x: x, 2.0, 1, 32, min_level=5)

    def test_invalid_exponent(self):
        with pytest.raises(ValueError):
            lq_norm(lambda x: x, 1.0, 1, 64)

    def test_resolution_convergence_on_smooth_fixture(self):
        f = lambda x: np.sin(2 * np.pi * x) + 0.2 * np.cos(6 * np.pi * x)
        coarse = lq_norm(f, 3.0, 1, 256)
        fine = lq_norm(f, 3.0, 1, 512)
        assert abs(fine - coarse) < 0.01 * fine

    def test_high_dimensional_sampled_path(self):
        # product of sines in d=4 via scrambled low-discrepancy sampling
        f = lambda P: np.prod(np.sin(2 * np.pi * P), axis=1)
        val = lq_norm(f, 2.0, 4, 1 << 14, seed=1)
        assert val == pytest.approx(2.0 ** (-2.0), rel=0.02)


class TestSobolevNormFourier:
    def test_constant(self):
        assert sobolev_norm_fourier({(0, 0): 1.0}, 1.5) == 1.0

    def test_single_mode(self):
        val = sobolev_norm_fourier({(1, 0): 0.5}, 1.0)
        assert val == pytest.approx(0.5 * np.sqrt(2.0))

    def test_matches_direct_summation(self):
        rng = np.random.default_rng(3)
        modes = {}
        for _ in range(5):
            s = tuple(rng.integers(-4, 5, size=2))
            modes[s] = complex(rng.normal(), rng.normal())
        r = 1.25
        direct = 0.0
        for s, c in modes.items():
            direct += abs(c) ** 2 * np.prod([(1.0 + sj**2) ** r for sj in s])
        assert sobolev_norm_fourier(modes, r) == pytest.approx(np.sqrt(direct), abs=1e-14)

    def test_trig_function_object(self):
        f = random_mixed_smooth(1.25, 6, 2, seed=0)
        assert sobolev_norm_fourier(f, 1.25) == pytest.approx(1.0, abs=1e-9)


class TestBlockNorms:
    def test_constant_function(self, cubic):
        f = lambda P: np.full(P.shape[0], 1.75)
        val = lp_block_norm(f, cubic, 1.25, 2.0, 3, d=1)
        assert val == pytest.approx(1.75, abs=1e-10)
        bes = besov_block_norm(f, cubic, 1.25, 2.0, 1.0, 3, d=1)
        assert bes == pytest.approx(1.75, abs=1e-10)

    def test_parseval_sanity(self, cubic):
        # r = 0 block norm approaches the L2 norm from below for band-limited f
        f = random_mixed_smooth(1.25, 3, 1, seed=6)
        l2 = lq_norm(f, 2.0, 1, 2**10)
        blk = lp_block_norm(f, cubic, 0.0, 2.0, 7, d=1)
        assert blk < l2 * 1.02
        assert blk > 0.98 * l2

    def test_single_block_scaling(self, faber):
        # a lone even-shift hat is its own hierarchical decomposition under
        # the interpolatory order-2 scheme, so the besov aggregation reduces
        # to its weighted Lp norm
        C = np.zeros(8)
        C[4] = 1.0
        hc = HierCoeffs(1, 2, 2, {(2,): C})
        r, p = 1.0, 2.0
        norm = besov_block_norm(hc, faber, r, p, 1.0, 4, d=1, resolution=2**9)
        direct = 2.0 ** (r * 2) * lq_norm(hc, p, 1, 2**9)
        assert norm == pytest.approx(direct, rel=1e-12)

    def test_scaled_single_spline_sweep_bounded(self, faber):
        # level-normalized lone splines keep a bounded weighted block norm
        # across levels (each is its own decomposition for the order-2 scheme)
        r = 1.0
        values = []
        for k0 in range(1, 6):
            C = np.zeros(2 ** (k0 + 1))
            C[2] = 2.0 ** (-r * k0)
            hc = HierCoeffs(1, 2, k0, {(k0,): C})
            values.append(lp_block_norm(hc, faber, r, 2.0, k0 + 1, d=1, resolution=2**8))
        assert max(values) <= 1.0
        assert all(v > 0 for v in values)

    def test_besov_sup_aggregation(self, faber):
        f = random_mixed_smooth(1.0, 4, 1, seed=8)
        m = 4
        norms = []
        from sparseqi.quasi_interp import SampleCache

        cache = SampleCache(f, faber.ell, 1)
        hc = decompose(faber, f, m, 1, cache=cache)
        axes = [np.arange(2**7) / 2**7]
        for k, C in hc.block_items():
            single = HierCoeffs(1, faber.ell, sum(k), {k: C})
            norms.append(2.0 ** (0.75 * sum(k)) * lq_norm(single, 2.0, 1, 2**7))
        sup = besov_block_norm(f, faber, 0.75, 2.0, np.inf, m, d=1, resolution=2**7, cache=cache)
        assert sup == pytest.approx(max(norms), rel=1e-12)


class TestDifference:
    def test_empty_axes_identity(self):
        f = lambda P: P[:, 0] * 2 + P[:, 1]
        assert difference(f, 2, (), (0.1, 0.1), (0.3, 0.4)) == pytest.approx(1.0)

    def test_hand_expansion(self):
        f = lambda x: np.asarray(x) ** 2
        # f(0) - 2 f(0.1) + f(0.2) = 0 - 0.02 + 0.04
        val = difference(f, 2, (0,), (0.1,), (0.0,))
        assert val == pytest.approx(0.02, abs=1e-15)

    @pytest.mark.parametrize("ell", [2, 4])
    def test_annihilates_low_degree(self, ell):
        for deg in range(ell):
            f = lambda P, deg=deg: P[:, 0] ** deg + (P[:, 1] + 0.5) ** deg
            val = difference(f, ell, (0, 1), (0.05, 0.07), (0.2, 0.1))
            assert abs(val) < 1e-12

    def test_product_rule_across_axes(self):
        f = lambda P: np.exp(P[:, 0]) * np.sin(P[:, 1] + 0.3)
        x, h = (0.2, 0.4), (0.03, 0.05)
        both = difference(f, 2, (0, 1), h, x)

        def inner(P):
            return np.array([difference(f, 2, (1,), h, (xi, yi)) for xi, yi in P])

        nested = difference(inner, 2, (0,), h, x)
        assert both == pytest.approx(nested, abs=1e-13)


class TestFitRate:
    def test_recovers_pure_exponent(self):
        errors = {m: 2.0 ** (-1.5 * m) for m in range(3, 11)}
        fit = fit_rate(errors, "pure_dyadic")
        assert fit.rho == pytest.approx(1.5, abs=1e-12)
        assert fit.beta == 0.0
        assert fit.residual < 1e-12

    def test_recovers_log_power(self):
        errors = {m: 2.0 ** (-m) * m**0.5 for m in range(3, 11)}
        fit = fit_rate(errors, "dyadic_logpow")
        assert fit.rho == pytest.approx(1.0, abs=1e-10)
        assert fit.beta == pytest.approx(0.5, abs=1e-10)
        assert fit.residual < 1e-10

    def test_fixed_beta(self):
        errors = {m: 3.0 * 2.0 ** (-0.75 * m) * m for m in range(2, 9)}
        fit = fit_rate(errors, "dyadic_logpow", beta=1.0)
        assert fit.rho == pytest.approx(0.75, abs=1e-10)
        assert fit.C == pytest.approx(3.0, rel=1e-9)

    def test_too_few_levels(self):
        with pytest.raises(DegenerateFit):
            fit_rate({3: 1.0, 4: 0.5, 5: 0.25})

    def test_non_decreasing_errors(self):
        with pytest.raises(DegenerateFit):
            fit_rate({m: float(m) for m in range(3, 9)})

    def test_non_positive_errors(self):
        errors = {m: 2.0**-m for m in range(3, 9)}
        errors[5] = 0.0
        with pytest.raises(DegenerateFit):
            fit_rate(errors)

    def test_default_drop_keeps_four_levels(self):
        errors = {m: 2.0**-m for m in range(3, 8)}  # five levels
        fit = fit_rate(errors)
        assert fit.range == (4, 7)

    def test_json_shape(self):
        errors = {m: 2.0**-m for m in range(3, 9)}
        blob = fit_rate(errors, "pure_dyadic").to_json()
        assert set(blob) >= {"rho", "beta", "C", "residual", "range"}


class TestNormSpec:
    def test_labels(self):
        assert "p=inf" in NormSpec("Lp", np.inf).label
        assert NormSpec("BesovBlock", 0.5, r=1.0, theta=np.inf).label

    def test_validation(self):
        with pytest.raises(ValueError):
            NormSpec("Lp", 1.0)
        with pytest.raises(ValueError):
            NormSpec("SobolevMixed", 3.0)
        with pytest.raises(ValueError):
            NormSpec("nope", 2.0)


def test_recovery_error_decreases(faber):
    f = random_mixed_smooth(1.0, 8, 2, seed=0)
    errs = []
    from sparseqi.quasi_interp import SampleCache

    cache = SampleCache(f, faber.ell, 2)
    for m in (2, 3, 4):
        hc = decompose(faber, f, m, 2, cache=cache)
        errs.append(recovery_error(f, hc, 2.0))
    assert errs[0] > errs[1] > errs[2]


def test_field_difference_requires_dimension():
    with pytest.raises(ValueError):
        FieldDifference(lambda x: x, lambda x: x)
