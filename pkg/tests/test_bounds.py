"""
Perturbation bounds and the link-budget formulas built on them.

Scalar oracles come from ``scipy.stats.norm.sf`` and direct ``math``
evaluation; subspace quantities are recomputed from explicit SVDs.
"""

import math

import numpy as np
import pytest
from scipy import stats

from nullcsi.bounds import (
    SQRT2,
    GapViolationError,
    LinkBudget,
    WedinInput,
    ber_upper_bound,
    capacity_bounds,
    capacity_degradation_weyl_bound,
    eta_gamma_decomposition,
    extended_sin_theta_bound,
    null_side_spectrum,
    qfunc,
    singular_shift,
    wedin_bound,
)
from nullcsi.channels import PathLossParams
from nullcsi.linalg import matrix_with_singular_values, spectral_norm, svd
from nullcsi.streams import make_stream


def cmat(rng, r, c):
    return rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))


class TestQ:
    @pytest.mark.parametrize("x", [0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0])
    def test_against_normal_tail(self, x):
        assert qfunc(x) == pytest.approx(stats.norm.sf(x), rel=1e-12)

    def test_zero(self):
        assert qfunc(0.0) == 0.5


class TestSingularShift:
    def test_diagonal_weyl_equality(self):
        res = singular_shift(np.diag([3.0, 1.0]), np.diag([0.1, 0.0]))
        np.testing.assert_allclose(res.shifts, [0.1, 0.0], atol=1e-15)
        assert res.weyl_bound == pytest.approx(0.1)
        assert res.max_shift == pytest.approx(res.weyl_bound)
        assert res.weyl_satisfied()

    def test_zero_perturbation(self):
        H = cmat(make_stream(0), 3, 2)
        res = singular_shift(H, np.zeros((3, 2)))
        np.testing.assert_array_equal(res.sigma, res.sigma_tilde)

    def test_diagonal_mirsky_equality(self):
        res = singular_shift(np.diag([2.0, 1.0]), np.diag([0.3, -0.4]))
        np.testing.assert_allclose(res.shifts, [0.3, 0.4], atol=1e-15)
        assert res.rms_aggregate == pytest.approx(0.5)
        assert res.mirsky_bound == pytest.approx(0.5)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            singular_shift(np.eye(2), np.eye(3))

    def test_random_pairs(self):
        rng = make_stream(1)
        for _ in range(500):
            r, c = rng.integers(1, 9, size=2)
            res = singular_shift(cmat(rng, r, c), rng.choice([1e-3, 0.1, 1.0]) * cmat(rng, r, c))
            assert res.weyl_satisfied() and res.mirsky_satisfied()


class TestEtaGamma:
    def test_zero_perturbation(self):
        assert tuple(eta_gamma_decomposition(cmat(make_stream(2), 3, 3), np.zeros((3, 3)))) == (0.0, 0.0, 0.0)

    def test_full_rank_square_has_no_complement(self):
        rng = make_stream(3)
        g = eta_gamma_decomposition(cmat(rng, 3, 3), cmat(rng, 3, 3))
        assert g.eta_lo == pytest.approx(0.0, abs=1e-12)
        assert g.eta_hi == pytest.approx(0.0, abs=1e-12)

    def test_zero_singular_value_envelope(self):
        # 8 x 3 of rank 2: the third singular value is exactly zero
        rng = make_stream(4)
        for _ in range(200):
            H = matrix_with_singular_values(8, 3, [2.0, 1.0], rng)
            T = 0.1 * cmat(rng, 8, 3)
            g = eta_gamma_decomposition(H, T, i=2)
            s_tilde = svd(H + T).sigma[2]
            assert s_tilde**2 <= g.gamma_abs_bound**2 + g.eta_hi**2 + 1e-9

    def test_bad_index(self):
        with pytest.raises(IndexError):
            eta_gamma_decomposition(np.eye(2), np.eye(2), i=2)


class TestWedin:
    def test_no_perturbation(self):
        H = cmat(make_stream(5), 5, 3)
        res = wedin_bound(WedinInput(H, H, 1))
        assert res.epsilon == pytest.approx(0.0, abs=1e-12)
        assert res.measured_sin_theta == pytest.approx(0.0, abs=1e-7)
        assert res.bound == pytest.approx(0.0, abs=1e-12)

    def test_diagonal_axes_unmoved(self):
        H = np.diag([5.0, 1.0])
        res = wedin_bound(WedinInput(H, H + np.diag([0.01, -0.02]), 1))
        assert res.measured_sin_theta == pytest.approx(0.0, abs=1e-12)
        assert res.bound >= 0 and res.gap_satisfied

    def test_gap_formula(self):
        H = np.diag([10.0, 2.0, 1.0])
        G = np.diag([9.5, 2.2, 0.9])
        res = wedin_bound(WedinInput(H, G, 1))
        assert res.delta == pytest.approx(min(9.5 - 2.0, 9.5))

    def test_split_validation(self):
        with pytest.raises(ValueError):
            WedinInput(np.eye(2), np.eye(2), 0)
        with pytest.raises(ValueError):
            WedinInput(np.eye(2), np.eye(2), 3)

    def test_gapped_ensemble(self):
        rng = make_stream(6)
        for _ in range(300):
            H = matrix_with_singular_values(6, 4, [10.2, 9.8, 1.1, 0.9], rng)
            G = H + 0.01 * cmat(rng, 6, 4)
            res = wedin_bound(WedinInput(H, G, 2))
            assert res.gap_satisfied and res.holds


class TestExtendedSinTheta:
    def test_no_perturbation(self):
        H = matrix_with_singular_values(3, 3, [2.0, 1.0], make_stream(7))
        res = extended_sin_theta_bound(H, H, 2)
        assert res.bound == pytest.approx(0.0, abs=1e-12)
        assert res.measured_sin_theta == pytest.approx(0.0, abs=1e-7)

    def test_continuity_at_zero(self):
        rng = make_stream(8)
        H = matrix_with_singular_values(3, 3, [2.0, 1.0], rng)
        T = cmat(rng, 3, 3)
        prev = None
        for scale in [1e-2, 1e-4, 1e-6]:
            res = extended_sin_theta_bound(H, H + scale * T, 2)
            assert res.holds
            if prev is not None:
                assert res.bound < prev.bound and res.measured_sin_theta <= prev.measured_sin_theta + 1e-12
            prev = res
        assert prev.bound < 1e-4 and prev.measured_sin_theta < 1e-4

    @pytest.mark.parametrize("shape", [(6, 4), (4, 6), (2, 2), (8, 3)])
    @pytest.mark.parametrize("norm", ["frobenius", "spectral"])
    def test_interval_ensemble(self, shape, norm):
        rng = make_stream(9)
        p = min(shape)
        r = max(1, p // 2)
        for _ in range(100):
            sig = np.concatenate([10 + rng.uniform(-0.3, 0.3, r), rng.uniform(0, 0.3, p - r)])
            H = matrix_with_singular_values(*shape, np.sort(sig)[::-1], rng)
            res = extended_sin_theta_bound(H, H + 0.05 * cmat(rng, *shape), r, norm=norm)
            assert res.gap_satisfied and res.holds

    def test_k_default_and_override(self):
        rng = make_stream(10)
        H = matrix_with_singular_values(3, 3, [2.0, 1.0], rng)
        G = H + 0.01 * cmat(rng, 3, 3)
        a = extended_sin_theta_bound(H, G, 2)
        b = extended_sin_theta_bound(H, G, 2, k=2.0)
        assert a.bound == pytest.approx(SQRT2 * a.eps_over_delta)
        assert b.bound == pytest.approx(2.0 * b.eps_over_delta)
        with pytest.raises(ValueError):
            extended_sin_theta_bound(H, G, 2, k=0.5)

    def test_empty_trailing_block(self):
        with pytest.raises(ValueError, match="empty"):
            extended_sin_theta_bound(np.eye(2), np.eye(2), 2)

    def test_rectangular_trailing_spectrum_has_zero(self):
        np.testing.assert_array_equal(null_side_spectrum(np.array([3.0, 1.0]), 2, 3, 2), [0.0])
        np.testing.assert_array_equal(null_side_spectrum(np.array([3.0, 1.0]), 2, 2, 1), [1.0])


class TestCapacityWeyl:
    def test_values(self):
        assert capacity_degradation_weyl_bound(np.zeros((2, 2))) == 0.0
        assert capacity_degradation_weyl_bound(np.diag([0.2, 0.1])) == pytest.approx(0.2)
        T = cmat(make_stream(11), 3, 2)
        assert capacity_degradation_weyl_bound(T) == spectral_norm(T)


class TestBerBound:
    def test_perfect_alignment(self):
        b = LinkBudget(e_p=10.0, e_s=100.0, n_0=2.0)
        assert ber_upper_bound(b, 0.0, 1.0) == pytest.approx(stats.norm.sf(math.sqrt(5.0)), rel=1e-12)

    def test_vanishing_signal(self):
        b = LinkBudget(e_p=1e-300, e_s=1.0, n_0=1.0)
        assert ber_upper_bound(b, 0.1, 1.0) == pytest.approx(0.5)

    def test_worked_value(self):
        b = LinkBudget(e_p=4.0, e_s=2.0, n_0=1.0, path=PathLossParams(1.0, 2.0))
        expected = 0.5 * math.erfc(math.sqrt(4 / (1 + math.sqrt(2))) / math.sqrt(2))
        assert ber_upper_bound(b, 0.5, 1.0, SQRT2) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(stats.norm.sf(math.sqrt(4 / (1 + math.sqrt(2)))), rel=1e-12)

    def test_path_loss_attenuates(self):
        near = LinkBudget(e_p=4.0, e_s=20.0, n_0=1.0, path=PathLossParams(1.0, 3.0))
        far = LinkBudget(e_p=4.0, e_s=20.0, n_0=1.0, path=PathLossParams(4.0, 3.0))
        assert ber_upper_bound(far, 0.3, 1.0) < ber_upper_bound(near, 0.3, 1.0)

    def test_errors(self):
        b = LinkBudget()
        with pytest.raises(GapViolationError):
            ber_upper_bound(b, 0.1, 0.0)
        with pytest.raises(ValueError):
            ber_upper_bound(b, -0.1, 1.0)
        with pytest.raises(ValueError):
            ber_upper_bound(b, 0.1, 1.0, k=0.9)


class TestCapacityBounds:
    def test_aligned(self):
        c = capacity_bounds(LinkBudget(), 0.0, 0.0, 1.0)
        assert c.c_tilde == c.c_clean
        assert c.degradation_upper == pytest.approx(0.0)

    def test_equality_at_bound_value(self):
        b = LinkBudget()
        eps, delta = 0.02, 0.5
        c = capacity_bounds(b, SQRT2 * eps / delta, eps, delta)
        assert c.c_tilde == pytest.approx(c.c_tilde_lower, rel=1e-14)

    def test_worked_value(self):
        b = LinkBudget(e_p=10.0, e_s=1.0, n_0=1.0, path=PathLossParams(2.0, 2.0))
        c = capacity_bounds(b, 0.4, 0.0, 1.0)
        assert c.c_tilde == pytest.approx(math.log2(10 / 1.1), rel=1e-14)
        assert c.c_clean == pytest.approx(math.log2(10.0))

    def test_ordering(self):
        b = LinkBudget(e_s=50.0)
        c = capacity_bounds(b, 0.05, 0.1, 1.0)
        assert c.c_tilde_lower <= c.c_tilde <= c.c_clean
        assert c.degradation_upper == pytest.approx(c.c_clean - c.c_tilde_lower)

    def test_gap_violation(self):
        with pytest.raises(GapViolationError):
            capacity_bounds(LinkBudget(), 0.1, 0.1, 0.0)


def test_budget_validation():
    with pytest.raises(ValueError):
        LinkBudget(e_p=0.0)
    with pytest.raises(ValueError):
        LinkBudget(e_s=-1.0)
    with pytest.raises(ValueError):
        LinkBudget(n_0=0.0)
