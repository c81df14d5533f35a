"""Quadrature grid, recurrence construction, polynomial evaluation and the
three log-derivative routes."""

import math

import numpy as np
import pytest

from guejump import (JumpWeightSpec, LossOfPositivityError, build_quadrature,
                     compute_recurrence, eval_monic_op, eval_monic_pair,
                     hankel_dlog_cd, hankel_dlog_subleading, log_hankel_gue)
from guejump.op_engine import _hankel_dlog_sum

from oracles import jump_weight_moments, monic_op_value

SQRT_PI = 1.7724538509055160273
# sqrt(pi) - int_0^1 exp(-x^2) dx, frozen from the mpmath quadrature oracle
M0_GAP_01 = 1.0256297180930890
# pi_4(0) for the canonical spec, frozen from the moment-determinant oracle
PI4_AT_0 = 0.6223715078692714

HERMITE = JumpWeightSpec(0.0, 1.0, 1.0, 1.0)


class TestQuadrature:
    def test_trivial_gaussian_mass(self):
        grid = build_quadrature(HERMITE, 1)
        assert grid.moment(0) == pytest.approx(SQRT_PI, abs=1e-13)

    def test_first_moment_vanishes_by_symmetry(self):
        grid = build_quadrature(HERMITE, 1)
        assert abs(grid.moment(1)) < 1e-14

    def test_erf_type_mass(self):
        grid = build_quadrature(JumpWeightSpec(0.0, 1.0, 0.0, 1.0), 1)
        assert grid.moment(0) == pytest.approx(M0_GAP_01, abs=1e-13)

    def test_oracle_agrees_with_adaptive_quadrature(self, canonical_spec):
        m = jump_weight_moments(0.3, 1.1, 0.4, 0.7, 4)
        grid = build_quadrature(canonical_spec, 3)
        for k in range(5):
            assert grid.moment(k) == pytest.approx(float(m[k]), rel=1e-13)

    def test_moments_stable_under_node_doubling(self, canonical_spec):
        n = 20
        g1 = build_quadrature(canonical_spec, n, nodes_per_panel=40)
        g2 = build_quadrature(canonical_spec, n, nodes_per_panel=80)
        for k in range(0, 2 * n + 1, 4):
            a, b = g1.moment(k), g2.moment(k)
            assert a == pytest.approx(b, rel=1e-13)

    def test_weights_nonnegative_and_jump_aligned(self, canonical_spec):
        grid = build_quadrature(canonical_spec, 10)
        assert (grid.weights >= 0).all()
        assert any(abs(e - canonical_spec.s1) < 1e-14 for e in grid.panel_edges)
        assert any(abs(e - canonical_spec.s2) < 1e-14 for e in grid.panel_edges)

    def test_rejects_out_of_range(self, canonical_spec):
        with pytest.raises(ValueError):
            build_quadrature(canonical_spec, 0)
        with pytest.raises(ValueError):
            build_quadrature(canonical_spec, 501)


class TestSpec:
    def test_requires_ordered_jumps(self):
        with pytest.raises(ValueError):
            JumpWeightSpec(1.0, 1.0, 0.5, 0.5)
        with pytest.raises(ValueError):
            JumpWeightSpec(0.0, 1.0, -0.1, 0.5)

    def test_single_jump_constructor(self):
        s = JumpWeightSpec.single_jump(0.25, 0.6)
        assert s.omega1 == s.omega2 == 0.6
        assert s.s1 == 0.25


class TestRecurrence:
    def test_hermite_alpha_beta(self, hermite_table):
        t = hermite_table
        assert np.abs(t.alpha).max() < 1e-12
        k = np.arange(1, t.n_max)
        assert np.abs(t.beta2[1:] - k / 2.0).max() < 1e-10

    def test_hermite_small_determinants(self, hermite_table):
        # ln D_1 = ln sqrt(pi), ln D_2 = ln(pi/2)
        assert hermite_table.log_hankel[0] == pytest.approx(0.5723649429247001, abs=1e-12)
        assert hermite_table.log_hankel[1] == pytest.approx(0.4515827052894549, abs=1e-12)
        # cross-check D_2 against raw moments m0 m2 - m1^2 = pi/2
        grid = build_quadrature(HERMITE, 2)
        d2 = grid.moment(0) * grid.moment(2) - grid.moment(1) ** 2
        assert d2 == pytest.approx(math.pi / 2.0, rel=1e-13)

    def test_hermite_matches_closed_form_hankel(self, hermite_table):
        for n in (1, 2, 5, 20, 60, 100):
            assert hermite_table.log_hankel[n - 1] == pytest.approx(
                log_hankel_gue(n), abs=1e-9)

    def test_equal_heights_match_single_jump_constructor(self):
        a = compute_recurrence(JumpWeightSpec(0.3, 2.2, 0.65, 0.65), 25)
        b = compute_recurrence(JumpWeightSpec.single_jump(0.3, 0.65), 25)
        assert np.abs(a.alpha - b.alpha).max() < 1e-12
        assert np.abs(a.beta2 / b.beta2 - 1.0).max() < 1e-12

    def test_stability_under_node_doubling(self, canonical_spec):
        n = 120
        a = compute_recurrence(canonical_spec, n, nodes_per_panel=40)
        b = compute_recurrence(canonical_spec, n, nodes_per_panel=80)
        assert np.abs(a.alpha - b.alpha).max() < 1e-11
        assert np.abs(a.beta2 / b.beta2 - 1.0).max() < 1e-11

    def test_positivity(self, canonical_table):
        assert (canonical_table.beta2 > 0).all()

    def test_loss_of_positivity_signals(self):
        # weight supported only where exp(-x^2) underflows
        with pytest.raises(LossOfPositivityError):
            compute_recurrence(JumpWeightSpec(-35.0, -34.0, 0.0, 0.0), 5)

    def test_orthogonality_residual(self, canonical_spec, canonical_table):
        n_top = 50
        table = compute_recurrence(canonical_spec, n_top + 1)
        grid = build_quadrature(canonical_spec, n_top + 1)
        P = np.zeros((n_top + 1, grid.nodes.size))
        P[0] = 1.0
        P[1] = grid.nodes - table.alpha[0]
        for k in range(1, n_top):
            P[k + 1] = (grid.nodes - table.alpha[k]) * P[k] - table.beta2[k] * P[k - 1]
        G = (P * grid.weights) @ P.T
        h = np.exp(table.log_norm[:n_top + 1])
        off = G - np.diag(np.diag(G))
        for m in range(n_top + 1):
            for n in range(m + 1, n_top + 1):
                assert abs(off[m, n]) <= 1e-10 * h[n]


class TestEval:
    def test_hermite_values(self, hermite_table):
        p, _ = eval_monic_op(hermite_table, 2, 1.0)
        assert p == pytest.approx(0.5, abs=1e-13)  # x^2 - 1/2 at 1
        p3, _ = eval_monic_op(hermite_table, 3, 0.0)
        assert abs(p3) < 1e-13  # odd polynomial

    def test_derivative_matches_finite_difference(self, canonical_table):
        h = 1e-6
        for n in (3, 7, 15):
            for x in (-0.5, 0.3, 1.1, 2.0):
                pp, _ = eval_monic_op(canonical_table, n, x + h)
                pm, _ = eval_monic_op(canonical_table, n, x - h)
                _, dp = eval_monic_op(canonical_table, n, x)
                assert dp == pytest.approx((pp - pm) / (2 * h), rel=1e-7, abs=1e-9)

    def test_gram_schmidt_oracle_value(self, canonical_table):
        p, _ = eval_monic_op(canonical_table, 4, 0.0)
        assert p == pytest.approx(PI4_AT_0, abs=1e-10)

    def test_log_scaled_evaluation_consistent(self, canonical_table):
        r = eval_monic_pair(canonical_table, 12, 1.7)
        p, dp = eval_monic_op(canonical_table, 12, 1.7)
        assert p == pytest.approx(r.pn * math.exp(r.log_scale), rel=1e-14)
        assert dp == pytest.approx(r.dpn * math.exp(r.log_scale), rel=1e-14)

    def test_large_argument_uses_rescaling(self):
        spec = JumpWeightSpec(22.0, 23.0, 0.4, 0.7)
        table = compute_recurrence(spec, 260)
        r = eval_monic_pair(table, 256, 22.0)
        assert r.log_scale > 0
        assert math.isfinite(r.pn) and math.isfinite(r.dpn)


class TestLogDerivativeRoutes:
    def test_trivial_weight_gives_zero(self, hermite_table):
        assert hankel_dlog_cd(hermite_table, 10) == 0.0
        assert abs(hankel_dlog_subleading(hermite_table, 10)) < 1e-11

    def test_equal_heights_drop_second_jump(self):
        spec = JumpWeightSpec(0.3, 1.4, 0.65, 0.65)
        table = compute_recurrence(spec, 12)
        # prefactor at s2 vanishes: CD route must equal its s1 term alone
        full = hankel_dlog_cd(table, 8)
        sub = hankel_dlog_subleading(table, 8)
        assert full == pytest.approx(sub, abs=1e-9)

    @pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
    def test_three_routes_agree_on_random_specs(self, seed):
        rng = np.random.default_rng(seed)
        s1, s2 = np.sort(rng.uniform(-2.0, 3.0, size=2))
        if s2 - s1 < 0.05:
            s2 = s1 + 0.05
        w1, w2 = rng.uniform(0.0, 2.0, size=2)
        spec = JumpWeightSpec(float(s1), float(s2), float(w1), float(w2))
        n = int(rng.integers(2, 12))
        table = compute_recurrence(spec, n + 1)
        cd = hankel_dlog_cd(table, n)
        sub = hankel_dlog_subleading(table, n)
        srt = _hankel_dlog_sum(table, n)
        assert cd == pytest.approx(sub, abs=1e-9)
        assert cd == pytest.approx(srt, abs=1e-9)
        # finite-difference route along the diagonal shift
        h = 1e-5

        def ln_dn(shift):
            sp = JumpWeightSpec(spec.s1 + shift, spec.s2 + shift, w1, w2)
            return float(compute_recurrence(sp, n + 1).log_hankel[n - 1])

        fd = (ln_dn(h) - ln_dn(-h)) / (2 * h)
        assert cd == pytest.approx(fd, abs=1e-6)


def test_far_jumps_leave_determinant_unchanged():
    # jumps beyond the spectrum edge sqrt(2n) perturb ln D_n only
    # exponentially little; qualitative decay check
    n = 30
    base = math.sqrt(2 * n)
    devs = []
    for c in (1.5, 2.5):
        s1 = base + c
        t = compute_recurrence(JumpWeightSpec(s1, s1 + 1.0, 0.3, 1.7), n)
        devs.append(abs(float(t.log_hankel[n - 1]) - log_hankel_gue(n)))
    assert devs[0] < 1e-6
    assert devs[1] < 1e-10
    assert devs[1] < devs[0]


def test_table_rows_shape(canonical_table):
    rows = list(canonical_table.rows())
    assert len(rows) == canonical_table.n_max
    assert len(rows[0]) == 5


def test_gamma_log_consistency(canonical_table):
    g = canonical_table.gamma
    assert np.allclose(np.log(g), canonical_table.log_gamma)
