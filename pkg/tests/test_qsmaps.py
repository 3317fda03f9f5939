import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grushin.ccsolver import DEFAULT_REGION
from grushin.core import GrushinPoint, quasidistance
from grushin.qsmaps import (
    CaseLabel,
    Norm,
    ScaleForm,
    classify_case,
    classify_xy,
    eta_estimate,
    forward_map,
    forward_xy,
    inverse_map,
    inverse_xy,
    sandwich_check,
    sandwich_ratios,
)

coord = st.floats(-20, 20, allow_nan=False)
alphas = st.sampled_from([0.5, 1.0, 2.0, 3.0, 4.0])


class TestMaps:
    def test_examples(self):
        for alpha in (0.5, 2.0, 3.0):
            assert forward_map((0, 5), alpha) == (0.0, 5.0)
            assert inverse_map((0, -7), alpha) == GrushinPoint(0, -7)
        assert forward_map((2, 1), 2) == (4.0, 1.0)
        assert forward_map((-3, 0), 2) == (-9.0, 0.0)
        assert inverse_map((4, 1), 2) == GrushinPoint(2, 1)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0, 4.0])
    def test_round_trip(self, alpha):
        rng = np.random.default_rng(8)
        x, y = rng.uniform(-10, 10, (2, 10_000))
        u, v = forward_xy(x, y, alpha)
        bx, by = inverse_xy(u, v, alpha)
        np.testing.assert_allclose(bx, x, rtol=1e-12, atol=0)
        assert np.array_equal(by, y)
        cu, cv = forward_xy(*inverse_xy(x, y, alpha), alpha)
        np.testing.assert_allclose(cu, x, rtol=1e-12, atol=0)

    @given(coord, coord, alphas)
    def test_odd_and_increasing(self, x, y, alpha):
        u, _ = forward_map((x, y), alpha)
        assert forward_map((-x, y), alpha)[0] == -u
        assert forward_map((x + 1.0, y), alpha)[0] > u


class TestClassify:
    def test_case_one(self):
        label, f = classify_case((0, 0), (1, 1))
        assert label is CaseLabel.CASE_1
        assert f.form is ScaleForm.QUADRATIC and f(3.0) == 9.0

    def test_case_two(self):
        assert quasidistance((2, 0), (2.5, 1)) == 0.5
        label, f = classify_case((2, 0), (2.5, 1), 2)
        assert label is CaseLabel.CASE_2
        assert f.form is ScaleForm.LINEAR_IN_X and f.coefficient == 2.0

    def test_case_three_one(self):
        assert quasidistance((0.1, 0), (0.05, 4)) == 2.0
        label, f = classify_case((0.1, 0), (0.05, 4), 2)
        assert label is CaseLabel.CASE_3_1
        assert f.form is ScaleForm.QUADRATIC

    def test_case_three_two_and_three(self):
        assert classify_case((0.1, 0), (0.3, 4))[0] is CaseLabel.CASE_3_2
        assert classify_case((0.1, 0), (1.5, 4))[0] is CaseLabel.CASE_3_3

    def test_normalization(self):
        # reflection and vertical translation of the pair do not change the label
        a = classify_case((0.1, 0), (0.3, 4))
        assert classify_case((-0.1, 7), (-0.3, 11)) == a

    def test_tie_breaks(self):
        # d = 3x exactly resolves to case 2
        assert classify_case((1, 0), (4, 0))[0] is CaseLabel.CASE_2
        # |x'| = r/3 exactly resolves to case 3.3: z=(0.5,0), z'=(-1,y') with r = 3
        assert quasidistance((0.5, 0), (-1, 9)) == 3.0
        assert classify_case((0.5, 0), (-1, 9))[0] is CaseLabel.CASE_3_3

    def test_total_and_swap_symmetry(self):
        rng = np.random.default_rng(6)
        P = rng.uniform(-2, 2, (20_000, 4))
        P[:500, 0] = 0.0
        for alpha in (1.0, 2.0, 3.0):
            code, r, _ = classify_xy(*P.T, alpha)
            assert set(np.unique(code)) == {0, 1, 2, 3, 4}
            swapped, r_sw, _ = classify_xy(P[:, 2], P[:, 3], P[:, 0], P[:, 1], alpha)
            assert np.array_equal(r, r_sw)
            assert np.all(swapped[code == 3] == 2)
            assert np.all(swapped[code == 4] == 1)

    @pytest.mark.parametrize("alpha", [0.5, 2.0, 4.0])
    def test_contraction_per_form(self, alpha):
        rng = np.random.default_rng(12)
        for z in rng.uniform(-2, 2, (300, 4)):
            _, f = classify_case(z[:2], z[2:], alpha)
            eps, r = rng.uniform(0, 1), rng.uniform(0, 1e3)
            assert f(eps * r) <= eps * f(r) * (1 + 1e-15)


class TestSandwich:
    def test_case_two_window(self):
        a, _ = sandwich_ratios(2.0, 0.0, 2.5, 1.0, 2.0, Norm.LINF)
        assert a == pytest.approx(2.25, rel=1e-15)
        chk = sandwich_check((2, 0), (2.5, 1), 2, 20.0, Norm.LINF, lower=1 / 12)
        assert chk.passed and chk.upper_ratio == pytest.approx(2.25)

    def test_origin_pairs_exact(self):
        chk = sandwich_check((0, 0), (1, 1), 2, 20.0, Norm.LINF)
        assert chk.lower_ratio == chk.upper_ratio == 1.0
        for t in (1e-3, 0.5, 7.0):
            chk = sandwich_check((0, 0), (0, t), 2, 20.0, Norm.LINF)
            assert chk.lower_ratio == pytest.approx(1.0, rel=1e-15)
            assert chk.upper_ratio == pytest.approx(1.0, rel=1e-15)

    def test_degenerate(self):
        with pytest.raises(ValueError):
            sandwich_check((1, 1), (1, 1))

    def test_euclidean_window(self):
        rng = np.random.default_rng(13)
        P = rng.uniform(-2, 2, (100_000, 4))
        a, b = sandwich_ratios(*P.T, 2.0, Norm.EUCLIDEAN)
        c = 20 * math.sqrt(2)
        assert np.all((a >= 1 / c) & (a <= c) & (b >= 1 / c) & (b <= c))

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0, 4.0])
    def test_general_alpha_ratios_bounded(self, alpha):
        rng = np.random.default_rng(14)
        P = rng.uniform(-2, 2, (50_000, 4))
        a, b = sandwich_ratios(*P.T, alpha, Norm.LINF)
        r = np.concatenate([a, b])
        assert np.all(np.isfinite(r)) and r.min() > 0.05 and r.max() < 50


class TestEta:
    def test_identity_hook(self):
        env = eta_estimate(DEFAULT_REGION, 2.0, 20_000, 3, 16, identity=True)
        full = env.count > 0
        np.testing.assert_allclose(env.rho_max[full], env.t_rep[full], rtol=0.02)

    def test_envelope_monotone_and_finite(self):
        env = eta_estimate(DEFAULT_REGION, 2.0, 50_000, 4, 24)
        assert np.all(np.isfinite(env.envelope))
        assert np.all(np.diff(env.envelope) >= 0)
        assert env.count.sum() == 50_000

    def test_deterministic(self):
        a = eta_estimate(DEFAULT_REGION, 2.0, 10_000, 5, 12)
        b = eta_estimate(DEFAULT_REGION, 2.0, 10_000, 5, 12)
        for name in ("t_lo", "t_hi", "rho_max", "envelope", "count"):
            assert np.array_equal(getattr(a, name), getattr(b, name), equal_nan=True)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            eta_estimate(n_triples=0)
        with pytest.raises(ValueError):
            eta_estimate(n_triples=10, n_bins=1)
