"""Limit-system solver: tail data, Hamiltonian bookkeeping, degenerate
channels, exponent routes and the distribution laws."""

import math

import numpy as np
import pytest

import guejump.painleve_ii as p2
from guejump import (CPIIParams, PoleOrSignChangeError, airy_ai,
                     conditional_distribution_limit,
                     fredholm_airy_discontinuous, gap_probability_limit,
                     hamiltonian_ii, hankel_ratio_prediction,
                     orthopoly_predictions, solve_as_pii, solve_cpii,
                     tracy_widom_cdf, tw_exponent)
from guejump.painleve_ii import _exponent_routes


class TestParams:
    def test_coupled_mode_needs_positive_separation(self):
        with pytest.raises(ValueError):
            CPIIParams(omega1=0.4, omega2=0.7, s=0.0)
        CPIIParams(omega1=0.5, omega2=0.5, s=0.0)  # single channel is fine

    def test_channel_coefficients(self):
        p = CPIIParams(omega1=0.4, omega2=0.7, s=1.0)
        assert p.c1 == pytest.approx(0.6)
        assert p.c2 == pytest.approx(-0.3)


class TestSolve:
    def test_tail_matches_airy_data(self):
        s = 1.0
        traj = solve_cpii(CPIIParams(omega1=0.4, omega2=0.7, s=s), x_min=-1.0)
        x = traj.x_max
        v1, v2, w1, w2, _ = traj.state(x)
        assert v1 / (0.6 * airy_ai(x).ai ** 2) == pytest.approx(1.0, abs=1e-8)
        assert v2 / (-0.3 * airy_ai(x + s).ai ** 2) == pytest.approx(1.0, abs=1e-8)
        assert w1 == pytest.approx(airy_ai(x).aip / airy_ai(x).ai, rel=1e-9)
        assert w2 == pytest.approx(airy_ai(x + s).aip / airy_ai(x + s).ai, rel=1e-9)

    def test_tail_dominance_of_unshifted_channel(self):
        # gap parameters: unshifted channel carries coefficient 1
        traj = solve_cpii(CPIIParams(omega1=0.0, omega2=1.0, s=1.0), x_min=-1.0)
        v1, v2, *_ = traj.state(6.0)
        assert 0.99 <= v1 / airy_ai(6.0).ai ** 2 <= 1.01
        assert 0.99 <= v2 / (-airy_ai(7.0).ai ** 2) <= 1.01

    def test_equal_heights_kill_shifted_channel(self):
        traj = solve_cpii(CPIIParams(omega1=0.6, omega2=0.6, s=0.0), x_min=-2.0)
        assert np.all(traj.v2 == 0.0)
        assert np.any(traj.v1 != 0.0)

    def test_unit_first_height_kills_unshifted_channel(self):
        s = 0.7
        traj = solve_cpii(CPIIParams(omega1=1.0, omega2=0.3, s=s), x_min=-2.0)
        assert np.all(traj.v1 == 0.0)
        # surviving channel is the shifted single-channel solution:
        # u2(x) = q(x + s) with tail sqrt(1 - omega2) Ai(x + s)
        single = solve_as_pii(0.3, x_min=-2.0 + s)
        for x in (-1.5, 0.0, 2.0):
            v2 = traj.state(x)[1]
            q = single.amplitudes(x + s)[0]
            assert v2 == pytest.approx(q * q, rel=1e-8)

    def test_channel_signs_preserved(self):
        traj = solve_cpii(CPIIParams(omega1=0.25, omega2=0.75, s=1.0),
                          x_min=-2.0)
        assert np.all(traj.sigma1 * traj.v1 >= 0.0)
        assert np.all(traj.sigma2 * traj.v2 >= 0.0)
        assert traj.sigma1 == 1.0 and traj.sigma2 == -1.0

    def test_preconditions(self):
        p = CPIIParams(omega1=0.4, omega2=0.7, s=1.0)
        with pytest.raises(ValueError):
            solve_cpii(p, x_min=-11.0)
        with pytest.raises(ValueError):
            solve_cpii(p, x_min=-1.0, x_max=6.0)
        with pytest.raises(ValueError):
            solve_cpii(p, x_min=-1.0, tol=1e-6)

    def test_near_critical_depth_cap(self):
        p = CPIIParams(omega1=0.0, omega2=0.9995, s=1.0)  # |c2| = 0.9995
        with pytest.raises(ValueError):
            solve_cpii(p, x_min=-9.0)
        solve_cpii(p, x_min=-4.0)  # shallow solve is fine

    def test_blowup_guard_signals(self, monkeypatch):
        monkeypatch.setattr(p2, "_AMPLITUDE_BLOWUP", 1e-2)
        with pytest.raises(PoleOrSignChangeError):
            solve_cpii(CPIIParams(omega1=0.0, omega2=1.0, s=1.0), x_min=-2.0)


class TestHamiltonian:
    def test_zero_state(self):
        assert hamiltonian_ii(0.0, 0.0, 0.0, 0.0, 1.3, 0.5) == 0.0

    def test_single_channel_reduction(self):
        v1, w1, x = 0.7, -0.4, 1.2
        assert hamiltonian_ii(v1, 0.0, w1, 0.0, x, 2.0) == pytest.approx(
            -v1 * v1 - v1 * x + v1 * w1 * w1, rel=1e-14)

    def test_matches_trajectory_values(self, gap_trajectory):
        for i in (0, 100, 300, -1):
            x = float(gap_trajectory.x_grid[i])
            v1, v2, w1, w2, h = gap_trajectory.state(x)
            if math.isfinite(w1) and math.isfinite(w2):
                assert h == pytest.approx(
                    hamiltonian_ii(v1, v2, w1, w2, x, gap_trajectory.params.s),
                    rel=1e-9, abs=1e-12)

    def test_energy_drift_within_tolerance(self, gap_trajectory):
        assert gap_trajectory.hamiltonian_drift() <= 10.0 * gap_trajectory.tol

    def test_derivative_relation_by_finite_differences(self, gap_trajectory):
        # dH/dx = -(v1 + v2); central differences at h=1e-3 carry an O(h^2)
        # truncation budget on top of solver accuracy
        h = 1e-3
        for x in np.linspace(-1.5, 10.0, 24):
            hm = gap_trajectory.state(x - h)[4]
            hp = gap_trajectory.state(x + h)[4]
            v1, v2, *_ = gap_trajectory.state(x)
            assert abs((hp - hm) / (2 * h) + v1 + v2) < 1e-6

    def test_second_order_channel_equations(self):
        traj = solve_cpii(CPIIParams(omega1=0.25, omega2=0.75, s=1.0),
                          x_min=-2.0)
        h = 1e-3
        for x in np.linspace(-1.9, 8.0, 30):
            v1, v2, *_ = traj.state(x)
            for chan, v0, shift in ((0, v1, 0.0), (1, v2, traj.params.s)):
                if abs(v0) < 1e-3:  # the v-form is singular at channel zeros
                    continue
                vm = traj.state(x - h)[chan]
                vp = traj.state(x + h)[chan]
                vpp = (vm - 2 * v0 + vp) / h**2
                vpx = (vp - vm) / (2 * h)
                res = vpp - vpx**2 / (2 * v0) - 4 * v0 * (v1 + v2 + (x + shift) / 2)
                assert abs(res) < 5e-6


class TestExponent:
    def test_routes_agree(self, gap_trajectory):
        rv, rh = _exponent_routes(gap_trajectory, -2.0)
        assert abs(rv - rh) <= 1e-8

    def test_empty_tail(self):
        traj = solve_cpii(CPIIParams(omega1=0.4, omega2=0.7, s=1.0), x_min=0.0)
        e = tw_exponent(traj, traj.x_max)
        assert abs(e) < 1e-12

    def test_dead_channels_give_zero(self):
        traj = solve_cpii(CPIIParams(omega1=1.0, omega2=1.0, s=0.0), x_min=-3.0)
        assert tw_exponent(traj, -3.0) == pytest.approx(0.0, abs=1e-15)

    def test_below_domain_rejected(self, gap_trajectory):
        with pytest.raises(ValueError):
            tw_exponent(gap_trajectory, -2.5)


class TestGapLaw:
    def test_zero_length_window(self):
        assert gap_probability_limit(-1.0, -1.0) == 1.0

    def test_monotone_in_upper_edge(self):
        vals = [gap_probability_limit(-1.0, t2) for t2 in (-0.5, 0.0, 0.5, 1.0)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert all(0.0 < v <= 1.0 for v in vals)

    def test_against_fredholm_oracle(self):
        v = gap_probability_limit(-2.0, 0.0)
        f = fredholm_airy_discontinuous(-2.0, 0.0, 0.0, 1.0)
        assert abs(v - f) < 1e-4


class TestConditionalLaw:
    def test_bounds_and_monotonicity(self):
        vals = [conditional_distribution_limit(-1.0, t2, 0.5)
                for t2 in (-0.5, 0.0, 0.5, 1.5)]
        assert all(0.0 < v <= 1.0 for v in vals)
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_wide_window_decouples(self):
        v = conditional_distribution_limit(-1.0, 5.5, 0.5)
        assert abs(v - 1.0) < 2e-3

    def test_against_fredholm_ratio(self):
        v = conditional_distribution_limit(-1.0, 0.5, 0.5)
        num = fredholm_airy_discontinuous(-1.0, 0.5, 0.5, 0.0)
        den = fredholm_airy_discontinuous(-1.0, 0.5, 0.5, 0.5)
        assert abs(v - num / den) < 1e-4

    def test_rejects_bad_thinning(self):
        with pytest.raises(ValueError):
            conditional_distribution_limit(-1.0, 0.5, 0.0)


class TestSingleChannel:
    def test_unit_height_gives_zero_solution(self):
        traj = solve_as_pii(1.0, x_min=-5.0)
        assert np.all(traj.q == 0.0)

    def test_tracy_widom_against_fredholm(self, hm_trajectory):
        for t in (-3.0, -1.0, 0.0, 2.0):
            f2 = math.exp(-tw_exponent(hm_trajectory, t))
            det = fredholm_airy_discontinuous(t, t + 1.0, 0.0, 0.0)
            assert abs(f2 - det) < 1e-4

    def test_pii_equation_residual(self, hm_trajectory):
        # q'' = 2 q^3 + x q by central differences on the dense solution
        h = 1e-3
        for x in np.linspace(-5.5, 8.0, 28):
            qm = hm_trajectory.amplitudes(x - h)[0]
            q0 = hm_trajectory.amplitudes(x)[0]
            qp = hm_trajectory.amplitudes(x + h)[0]
            res = (qm - 2 * q0 + qp) / h**2 - 2 * q0**3 - x * q0
            assert abs(res) < 1e-6

    def test_energy_drift(self, hm_trajectory):
        assert hm_trajectory.hamiltonian_drift() <= 10.0 * hm_trajectory.tol

    def test_s_to_zero_consistency(self):
        # sup |v1 + v2 - q(x; omega2)^2| = O(s) on [-4, 4]
        single = solve_as_pii(0.0, x_min=-4.0)
        sups = {}
        for s in (1e-2, 1e-3):
            traj = solve_cpii(CPIIParams(omega1=0.5, omega2=0.0, s=s),
                              x_min=-4.0)
            dev = 0.0
            for x in np.linspace(-4.0, 4.0, 81):
                v1, v2, *_ = traj.state(x)
                q = single.amplitudes(x)[0]
                dev = max(dev, abs(v1 + v2 - q * q))
            sups[s] = dev
        assert sups[1e-2] <= 0.05
        assert sups[1e-3] < sups[1e-2]

    def test_omega_range_validated(self):
        with pytest.raises(ValueError):
            solve_as_pii(1.5, x_min=-2.0)


class TestCurveAndPredictions:
    def test_tw_curve_shape(self):
        curve = tracy_widom_cdf(np.linspace(-4.0, 2.0, 13))
        assert np.all(np.diff(curve.value) > 0)
        assert np.all((curve.value > 0) & (curve.value < 1))
        assert curve.method == "painleve-ii"

    def test_hankel_prediction_trivial_weight(self):
        pred = hankel_ratio_prediction(32, -0.5, 0.5, 1.0, 1.0)
        assert pred.log_ratio == 0.0

    def test_predictions_reject_dead_channels(self):
        with pytest.raises(ValueError):
            orthopoly_predictions(64, -0.5, 0.5, 1.0, 0.3)
        with pytest.raises(ValueError):
            orthopoly_predictions(64, -0.5, 0.5, 0.7, 0.7)

    def test_prediction_values_are_finite(self):
        pred = orthopoly_predictions(64, -0.5, 0.5, 0.4, 0.7)
        for v in (pred.alpha, pred.beta, pred.log_gamma_leading,
                  pred.gamma_correction, pred.log_abs_pn_s1,
                  pred.log_abs_pn_s2):
            assert math.isfinite(v)
