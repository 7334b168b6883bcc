import json

import numpy as np
import pytest

from sparseqi.analysis import fit_rate, lq_norm, sobolev_norm_fourier
from sparseqi.bspline import eval_tensor
from sparseqi.smolyak import enumerate_grid
from sparseqi.testfuncs import (
    TrigFunction,
    bernoulli_partial,
    builtin_function,
    g1_level_offset,
    g2_level_offset,
    random_mixed_smooth,
    witness_g1,
    witness_g2,
)
from .conftest import rng_points


class TestTrigFunction:
    def test_real_evaluation(self):
        f = random_mixed_smooth(1.0, 5, 2, seed=0)
        pts = rng_points(1000, 2, seed=1)
        vals = f.eval_points_complex(pts)
        assert np.max(np.abs(vals.imag)) < 1e-13
        assert np.array_equal(f.eval_points(pts), vals.real)

    def test_realness_flag_validation(self):
        with pytest.raises(ValueError):
            TrigFunction(1, {(1,): 1.0 + 0j}, real=True)  # no mirror mode

    def test_grid_matches_scattered(self):
        f = bernoulli_partial(2.0, 4, 2)
        axes = [np.arange(9) / 9, np.arange(7) / 7]
        grid = f.eval_on_axes(axes)
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2)
        assert np.max(np.abs(grid - f.eval_points(mesh).reshape(grid.shape))) < 1e-12

    def test_non_box_modes_still_evaluate(self):
        f = TrigFunction(2, {(1, 2): 1.0, (-1, -2): 1.0, (0, 0): 0.5}, real=True)
        x = (0.3, 0.7)
        expect = 0.5 + 2.0 * np.cos(2 * np.pi * (x[0] + 2 * x[1]))
        assert f(x) == pytest.approx(expect, abs=1e-13)
        axes = [np.array([0.3]), np.array([0.7])]
        assert f.eval_on_axes(axes)[0, 0] == pytest.approx(expect, abs=1e-13)

    def test_json_round_trip(self):
        f = bernoulli_partial(1.5, 3, 2)
        back = TrigFunction.from_json(json.loads(json.dumps(f.to_json())))
        pts = rng_points(50, 2, seed=2)
        assert np.array_equal(f.eval_points(pts), back.eval_points(pts))


class TestBernoulli:
    def test_first_mode_value(self):
        # univariate truncation at K=1, smoothness 2: 1 + 2cos(2 pi x - pi)
        f = bernoulli_partial(2.0, 1, 1)
        for x in (0.0, 0.2, 0.65):
            expect = 1.0 + 2.0 * np.cos(2 * np.pi * x - np.pi)
            assert f((x,)) == pytest.approx(expect, abs=1e-13)

    def test_tensorization_at_origin(self):
        uni = bernoulli_partial(1.5, 4, 1)
        biv = bernoulli_partial(1.5, 4, 2)
        assert biv((0.0, 0.0)) == pytest.approx(uni((0.0,)) ** 2, abs=1e-12)

    def test_sobolev_growth_threshold(self):
        # the weighted coefficient series diverges with K exactly when the
        # measuring exponent reaches the kernel smoothness minus 1/2: the
        # per-doubling increments grow above the threshold and shrink below
        r_kernel = 2.0
        for r, diverges in ((r_kernel - 0.3, True), (r_kernel - 0.7, False)):
            norms = [
                sobolev_norm_fourier(bernoulli_partial(r_kernel, K, 1), r) ** 2
                for K in (16, 64, 256, 1024)
            ]
            increments = np.diff(norms)
            if diverges:
                assert increments[-1] > increments[0]
            else:
                assert increments[-1] < 0.5 * increments[0]


class TestRandomMixedSmooth:
    def test_reproducible(self):
        f = random_mixed_smooth(1.25, 6, 2, seed=42)
        g = random_mixed_smooth(1.25, 6, 2, seed=42)
        assert f.modes == g.modes

    def test_seed_changes_function(self):
        f = random_mixed_smooth(1.25, 6, 2, seed=1)
        g = random_mixed_smooth(1.25, 6, 2, seed=2)
        assert f.modes != g.modes

    def test_unit_norm(self):
        for d in (1, 2):
            f = random_mixed_smooth(1.25, 8, d, seed=0)
            assert sobolev_norm_fourier(f, 1.25) == pytest.approx(1.0, abs=1e-9)


class TestWitnesses:
    def test_g1_vanishes_on_grid(self, faber):
        for m in (2, 4):
            w = witness_g1(faber, 2, m, 0.75)
            grid = enumerate_grid(2, m, faber)
            assert np.max(np.abs(w.eval_points(grid.as_array()))) < 1e-12

    def test_g1_matches_direct_spline_sum(self, faber):
        d, m, r = 2, 2, 0.75
        w = witness_g1(faber, d, m, r)
        M = w.max_level
        amp = 2.0 ** (-r * M) * M ** (-0.5)
        pts = rng_points(30, d, seed=4)
        for x in pts:
            direct = 0.0
            for k, C in w.block_items():
                for s0 in range(0, C.shape[0], faber.ell):
                    for s1 in range(0, C.shape[1], faber.ell):
                        direct += amp * eval_tensor(faber.ell, k, (s0, s1), x)
            assert w(tuple(x)) == pytest.approx(direct, abs=1e-12)

    def test_g1_block_sup_bounded_by_one(self, faber):
        # within one block the shifted splines have disjoint supports, so the
        # unscaled sum never exceeds one
        w = witness_g1(faber, 2, 3, 0.0)  # r = 0: amplitude is M^{-1/2}
        M = w.max_level
        for k, C in w.block_items():
            from sparseqi.quasi_interp import HierCoeffs

            single = HierCoeffs(2, faber.ell, M, {k: C * M**0.5})  # unit amplitude
            vals = single.eval_points(rng_points(200, 2, seed=5))
            assert np.max(vals) <= 1.0 + 1e-12
            assert np.min(vals) >= 0.0

    def test_g1_norm_sweep_shape(self, faber):
        d, r = 2, 0.75
        norms = {}
        for m in range(2, 7):
            w = witness_g1(faber, d, m, r)
            norms[m] = lq_norm(w, 2.0, d, 2 ** (m + 3), min_level=w.max_level)
        fit = fit_rate(norms, "dyadic_logpow", drop_lowest=0)
        assert fit.rho == pytest.approx(r, abs=0.1)
        assert fit.beta > 0.0  # the (d-1)/2 log factor
        assert fit.residual < 0.15

    def test_g1_l1_lower_bound_shape(self, faber):
        # nonnegative witness: its mean is the L1 norm; the sweep grows like
        # the dyadic decay times a positive power of the level
        d, r = 2, 0.75
        norms = {}
        for m in range(3, 7):
            w = witness_g1(faber, d, m, r)
            res = 2 ** (w.max_level + 2)
            axes = [np.arange(res) / res] * d
            field = w.eval_on_axes(axes)
            assert field.min() >= 0.0
            norms[m] = float(field.mean())
        fit = fit_rate(norms, "dyadic_logpow", drop_lowest=0)
        assert fit.rho == pytest.approx(r, abs=0.1)
        assert fit.beta > 0.0

    def test_g2_single_entry(self, cubic):
        w = witness_g2(cubic, 2, 3, 1.25, 2.0)
        assert w.num_entries() == 1
        ((k, s, c),) = list(w.items())
        assert k == (3 + g2_level_offset(cubic.ell, 2), 0)
        assert s == (0, 0)
        assert c == pytest.approx(2.0 ** (-0.75 * k[0]))

    def test_g2_vanishes_on_grid(self, cubic):
        for m in (2, 3):
            w = witness_g2(cubic, 2, m, 1.25, 2.0)
            grid = enumerate_grid(2, m, cubic)
            assert np.max(np.abs(w.eval_points(grid.as_array()))) < 1e-12

    def test_g2_norm_ratio(self, cubic):
        r, p, q = 1.25, 2.0, 4.0
        norms = {}
        for m in (2, 3, 4, 5):
            w = witness_g2(cubic, 1, m, r, p)
            norms[m] = lq_norm(w, q, 1, 2 ** (m + 5), min_level=w.max_level)
        target = 2.0 ** (-(r - 1.0 / p + 1.0 / q))
        for m in (2, 3, 4):
            assert norms[m + 1] / norms[m] == pytest.approx(target, rel=0.1)

    def test_offsets(self):
        assert g1_level_offset(2, 2) == 1
        assert g1_level_offset(4, 2) == 3
        assert g2_level_offset(2, 1) == 1
        assert g2_level_offset(4, 3) == 2

    def test_insufficient_level_offset_detected(self, cubic):
        # with a too-small surplus the order-4 bump does touch the grid;
        # the default offset is the smallest safe one
        w = witness_g2(cubic, 2, 3, 1.25, 2.0, level_offset=1)
        grid = enumerate_grid(2, 3, cubic)
        assert np.max(np.abs(w.eval_points(grid.as_array()))) > 1e-6


class TestBuiltinFunction:
    def test_sine_product(self):
        f = builtin_function("sine", 2)
        pts = rng_points(100, 2, seed=6)
        expect = np.sin(2 * np.pi * pts[:, 0]) * np.sin(2 * np.pi * pts[:, 1])
        assert np.max(np.abs(f.eval_points(pts) - expect)) < 1e-13

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            builtin_function("nope", 1)
