"""Distinguished prejudice levels: the equalizing level, the two critical
levels, regret-curve crossings, and the population indifference level."""
from __future__ import annotations

import numpy as np
import pytest

from screenlab import (
    EndpointResolutionError,
    InconclusiveResolutionError,
    ModelConfig,
    clamped_tau_interval,
    expected_regret_gap,
    find_critical_prejudices,
    find_regret_crossings,
    find_tau_bar,
    find_tau_star,
    marginal_posterior_phi,
    score_s1,
    score_s2,
    threshold_report,
)
from conftest import BASELINE_DOC, ENGINEERED_DOC, baseline_theta_grid


class TestEqualizingPrejudice:
    def test_reference_value(self, baseline):
        np.testing.assert_allclose(
            find_tau_star(baseline, 0.0), -0.46857276580209095, atol=1e-12
        )

    def test_scores_coincide_at_root(self, baseline):
        for theta in baseline_theta_grid(9):
            tau = find_tau_star(baseline, float(theta))
            s1 = float(score_s1(baseline, theta, tau))
            s2 = float(score_s2(baseline, theta, tau))
            assert abs(s1 - s2) < 1e-10

    def test_sign_pattern_around_root(self, baseline):
        """s1 < s2 below the equalizing level, s1 > s2 above it."""
        tau = find_tau_star(baseline, 0.0)
        below = float(score_s1(baseline, 0.0, tau - 0.1)) - float(
            score_s2(baseline, 0.0, tau - 0.1)
        )
        above = float(score_s1(baseline, 0.0, tau + 0.1)) - float(
            score_s2(baseline, 0.0, tau + 0.1)
        )
        assert below < 0 < above

    def test_grid_scan_agrees(self, baseline):
        """Independent route: scan a fine grid for the sign change."""
        lo, hi = clamped_tau_interval(baseline.payoffs)
        taus = np.linspace(lo, hi, 20_001)
        diff = np.asarray(score_s1(baseline, 0.5, taus)) - np.asarray(
            score_s2(baseline, 0.5, taus)
        )
        flips = np.nonzero(np.diff(np.sign(diff)) != 0)[0]
        assert len(flips) == 1
        root = find_tau_star(baseline, 0.5)
        assert taus[flips[0]] <= root <= taus[flips[0] + 1]

    def test_far_tail_theta_raises_endpoint_error(self, baseline):
        with pytest.raises(EndpointResolutionError):
            find_tau_star(baseline, -30.0)


class TestCriticalPrejudices:
    def test_reference_values(self, baseline):
        d1, d2 = find_critical_prejudices(baseline, 0.0)
        np.testing.assert_allclose(d1, -0.35986836698867297, atol=1e-12)
        np.testing.assert_allclose(d2, -0.5124846463145134, atol=1e-12)

    def test_scores_meet_beta_at_roots(self, baseline):
        d1, d2 = find_critical_prejudices(baseline, 0.0)
        beta = baseline.beta
        assert abs(float(score_s1(baseline, 0.0, d1)) - beta) < 1e-10
        assert abs(float(score_s2(baseline, 0.0, d2)) - beta) < 1e-10

    def test_d1_absent_iff_phi_at_or_above_beta(self, baseline):
        for theta in baseline_theta_grid(15):
            phi = float(marginal_posterior_phi(baseline, theta))
            d1, _ = find_critical_prejudices(baseline, float(theta))
            assert (d1 is None) == (phi >= baseline.beta)

    def test_report_composes_everything(self, baseline):
        report = threshold_report(baseline, 0.0)
        assert report.ordering == "d2<d1"
        assert not report.knife_edge
        np.testing.assert_allclose(report.equalized_score, 0.458275772936962, atol=1e-9)
        assert report.tau_d2 < report.tau_star < report.tau_d1

    def test_ordering_flips_with_equalized_score(self, baseline):
        """The ordering of the two critical levels is decided by whether
        the equalized score sits below or above beta; sweep c to see both."""
        seen = set()
        for c in (-0.4, -0.2, 0.0, 0.2):
            config = ModelConfig.from_dict({**BASELINE_DOC, "c": c})
            report = threshold_report(config, 0.0)
            if report.tau_d1 is None:
                continue
            seen.add(report.ordering)
            below = report.equalized_score < config.beta
            assert (report.tau_d1 > report.tau_d2) == below
        assert {"d1<d2", "d2<d1"} <= seen

    def test_tuned_cutoff_makes_critical_levels_coincide(self, baseline):
        """Choosing c so that beta equals the equalized score forces both
        critical levels onto the equalizing level."""
        for theta in (-0.5, 0.0, 0.8):
            tau_star = find_tau_star(baseline, theta)
            s_star = float(score_s1(baseline, theta, tau_star))
            payoffs = baseline.payoffs
            tuned_c = s_star * (payoffs.x_q + payoffs.x_u) - payoffs.x_u
            tuned = ModelConfig.from_dict({**BASELINE_DOC, "c": tuned_c})
            d1, d2 = find_critical_prejudices(tuned, theta)
            assert d1 is not None
            assert abs(d1 - d2) < 1e-8
            assert abs(d1 - tau_star) < 1e-8

    def test_knife_edge_flagged(self):
        """With a symmetric prior and cutoff, phi equals beta exactly at
        the signal midpoint; the first critical level is absent there."""
        config = ModelConfig.from_dict({**BASELINE_DOC, "pi": 0.5})
        theta_mid = config.signal.theta_midpoint
        assert float(marginal_posterior_phi(config, theta_mid)) == config.beta
        report = threshold_report(config, float(theta_mid))
        assert report.knife_edge
        assert report.tau_d1 is None


class TestRegretCrossings:
    def test_unqualified_always_crosses_once_at_tau_star(self, baseline):
        for theta in (-1.0, 0.0, 1.5):
            report = find_regret_crossings(baseline, theta, 0)
            assert report.case_label == "unqualified"
            assert len(report.crossings) == 1
            np.testing.assert_allclose(
                report.crossings[0], find_tau_star(baseline, theta), atol=1e-8
            )

    def test_engineered_three_crossing_case(self, engineered):
        report = find_regret_crossings(engineered, 0.0, 1)
        assert report.case_label == "case-1"
        np.testing.assert_allclose(
            report.crossings,
            [-0.8659277598267762, -0.2028591487031362, 0.908976592983954],
            atol=1e-10,
        )

    def test_engineered_two_crossing_case(self, engineered):
        report = find_regret_crossings(engineered, 0.35, 1)
        assert report.case_label == "case-2"
        np.testing.assert_allclose(
            report.crossings,
            [-0.058202033224790284, 1.0228816697477456],
            atol=1e-10,
        )

    def test_crossings_verified_by_fine_scan(self, engineered):
        """Independent route: count sign changes of the regret gap on a
        fine grid, skipping the two payoff-jump cells."""
        from screenlab import individual_regret

        payoffs = engineered.payoffs
        lo, hi = clamped_tau_interval(payoffs)
        taus = np.linspace(lo, hi, 40_001)
        s1 = np.asarray(score_s1(engineered, 0.0, taus))
        s2 = np.asarray(score_s2(engineered, 0.0, taus))
        u1 = np.array([individual_regret(payoffs, s, 1).u for s in s1])
        u2 = np.array([individual_regret(payoffs, s, 1).u for s in s2])
        gap = u1 - u2
        beta = payoffs.beta
        jump_cell = (np.diff(np.sign(s1 - beta)) != 0) | (
            np.diff(np.sign(s2 - beta)) != 0
        )
        flips = (np.diff(np.sign(gap)) != 0) & ~jump_cell
        assert int(flips.sum()) == 3

    def test_boundary_flag_set_when_crossing_hugs_jump(self, engineered):
        reports = [find_regret_crossings(engineered, t, 1) for t in (0.0, 0.35)]
        assert all(not any(r.boundary_flags) for r in reports)


class TestTauBar:
    def test_analytic_reference_value(self, baseline):
        result = find_tau_bar(baseline, "analytic")
        assert result.mode == "analytic"
        np.testing.assert_allclose(result.value, -0.4086591074919251, atol=1e-7)

    def test_gap_changes_sign_across_value(self, baseline):
        result = find_tau_bar(baseline, "analytic")
        assert expected_regret_gap(baseline, result.value - 0.05) > 0
        assert expected_regret_gap(baseline, result.value + 0.05) < 0

    def test_irregular_returns_none_with_reason(self, irregular_config):
        result = find_tau_bar(irregular_config, "analytic")
        assert result.value is None
        assert result.reason == "irregular"

    def test_mc_mode_brackets_analytic_value(self, baseline):
        analytic = find_tau_bar(baseline, "analytic").value
        result = find_tau_bar(baseline, "mc", m=100_000, seed=5)
        assert result.mode == "mc"
        assert result.standard_error is not None
        assert abs(result.value - analytic) < 4 * result.standard_error

    def test_mc_mode_irregular_detected(self, irregular_config):
        result = find_tau_bar(irregular_config, "mc", m=200_000, seed=5)
        assert result.value is None
        assert result.reason == "irregular"

    def test_mc_mode_too_small_sample_is_inconclusive(self, baseline):
        with pytest.raises(InconclusiveResolutionError):
            find_tau_bar(baseline, "mc", m=60, seed=5)
