"""Tail fitting: recovery, equivariance, refusals, verdict rules."""
import math

import numpy as np
import pytest

from itersup import tailfit
from itersup.mc import TailEstimate
from itersup.tailfit import (ParamFit, compare_prediction, estimate_alpha,
                             fit_beta_given_alpha, synthetic_tail_estimate)
from itersup.weibull import (WeibullTail, fbm_sup_unit_interval,
                             iterated_fbm_sup, normal_upper_tail)


def noiseless_estimate(tail, thresholds, n=10 ** 9):
    """Exact tail values dressed up as data; weights stay finite via n."""
    u = np.asarray(thresholds, dtype=float)
    p = np.array([tail.tail(float(x)) for x in u])
    se = np.sqrt(p * (1 - p) / n)
    return TailEstimate(u, p, se, n, 0.0, "NOISELESS")


class TestEstimateAlpha:
    def test_pure_exponential_is_exact(self):
        est = noiseless_estimate(WeibullTail(1.0, 1.0, 0.0, 1.0),
                                 [2, 3, 4, 5, 6])
        fit = estimate_alpha(est)
        assert fit.value == pytest.approx(1.0, rel=1e-9)

    def test_gamma_zero_c_one_any_alpha(self):
        est = noiseless_estimate(WeibullTail(1.5, 0.7, 0.0, 1.0),
                                 [2, 2.5, 3, 4])
        assert estimate_alpha(est).value == pytest.approx(1.5, rel=1e-9)

    def test_synthetic_round_trip(self):
        tail = iterated_fbm_sup(0.5, 0.5)
        est = synthetic_tail_estimate(tail, np.linspace(2, 5, 8),
                                      1_000_000, seed=0)
        fit = estimate_alpha(est)
        assert abs(fit.value - 4.0 / 3.0) < 0.15

    def test_refuses_bulk_probabilities(self):
        est = TailEstimate(np.array([0.5, 1, 2, 3]),
                           np.array([0.6, 0.2, 0.05, 0.01]),
                           np.full(4, 0.01), 10000, 0.0)
        with pytest.raises(ValueError, match="tail regime"):
            estimate_alpha(est)

    def test_needs_four_usable(self):
        est = TailEstimate(np.array([2.0, 3, 4, 5]),
                           np.array([0.05, 0.01, 1e-6, 0.0]),
                           np.full(4, 0.001), 10000, 0.0)
        with pytest.raises(ValueError, match="4 usable"):
            estimate_alpha(est)

    def test_scale_equivariance(self):
        tail = WeibullTail(1.5, 0.8, 0.0, 1.0)
        u = np.array([2.0, 2.5, 3.0, 3.5, 4.0])
        base = noiseless_estimate(tail, u)
        scaled = TailEstimate(3.0 * u, base.p_hat, base.std_err,
                              base.n_reps, 0.0)
        a1 = estimate_alpha(base).value
        a2 = estimate_alpha(scaled).value
        assert a2 == pytest.approx(a1, rel=1e-9)


class TestFitBeta:
    def test_noiseless_is_exact(self):
        tail = WeibullTail(4.0 / 3.0, 0.9449, -2.0 / 3.0, 0.82)
        est = noiseless_estimate(tail, [2, 3, 4, 5])
        fit, c_hat = fit_beta_given_alpha(est, tail.alpha, tail.gamma,
                                          tail.big_c)
        assert fit.value == pytest.approx(tail.beta, rel=1e-9)
        assert c_hat is None

    def test_free_intercept_recovers_prefactor(self):
        tail = WeibullTail(4.0 / 3.0, 0.9449, -2.0 / 3.0, 0.82)
        est = noiseless_estimate(tail, [2, 3, 4, 5])
        fit, c_hat = fit_beta_given_alpha(est, tail.alpha, tail.gamma, None)
        assert fit.value == pytest.approx(tail.beta, rel=1e-9)
        assert c_hat == pytest.approx(tail.big_c, rel=1e-9)

    def test_synthetic_beta_within_three_percent(self):
        tail = iterated_fbm_sup(0.5, 0.5)
        est = synthetic_tail_estimate(tail, np.linspace(2, 5, 8),
                                      1_000_000, seed=0)
        fit, _ = fit_beta_given_alpha(est, tail.alpha, tail.gamma,
                                      tail.big_c)
        assert abs(fit.value - tail.beta) / tail.beta < 0.03

    def test_scale_equivariance(self):
        tail = WeibullTail(1.5, 0.8, 0.0, 1.0)
        u = np.array([2.0, 2.5, 3.0, 4.0])
        base = noiseless_estimate(tail, u)
        c = 2.0
        scaled = TailEstimate(c * u, base.p_hat, base.std_err,
                              base.n_reps, 0.0)
        b1, _ = fit_beta_given_alpha(base, 1.5, 0.0, 1.0)
        b2, _ = fit_beta_given_alpha(scaled, 1.5, 0.0, 1.0)
        assert b2.value == pytest.approx(b1.value * c ** -1.5, rel=1e-9)

    def test_two_points_warn_one_fails(self):
        tail = WeibullTail(1.0, 1.0, 0.0, 1.0)
        with pytest.warns(tailfit.SparseFitWarning):
            fit, _ = fit_beta_given_alpha(
                noiseless_estimate(tail, [2.0, 3.0]), 1.0, 0.0, 1.0)
        assert fit.value == pytest.approx(1.0, rel=1e-9)
        with pytest.raises(ValueError, match="2 usable"):
            fit_beta_given_alpha(noiseless_estimate(tail, [2.0]),
                                 1.0, 0.0, 1.0)

    def test_rejects_nonpositive_prefactor(self):
        est = noiseless_estimate(WeibullTail(1.0, 1.0, 0.0, 1.0), [2, 3])
        with pytest.raises(ValueError, match="positive"):
            fit_beta_given_alpha(est, 1.0, 0.0, -2.0)

    def test_coverage_sanity(self):
        tail = iterated_fbm_sup(0.5, 0.5)
        u = np.linspace(2, 5, 8)
        cover = 0
        for s in range(40):
            est = synthetic_tail_estimate(tail, u, 1_000_000, seed=s)
            fit, _ = fit_beta_given_alpha(est, tail.alpha, tail.gamma,
                                          tail.big_c)
            cover += fit.covers(tail.beta)
        assert cover >= 32


def brownian_oracle_estimate(u, n, seed):
    p_true = np.array([2 * normal_upper_tail(float(x)) for x in u])
    gen = np.random.default_rng(seed)
    p_hat = gen.binomial(n, p_true) / n
    se = np.sqrt(p_hat * (1 - p_hat) / n)
    return TailEstimate(np.asarray(u, dtype=float), p_hat, se, n, 0.0,
                        "ORACLE")


class TestComparePrediction:
    def test_brownian_consistent(self):
        # asymptotic formula vs exact-law data; agreement grows with u
        u = [2.0, 2.5, 3.0, 3.5, 4.0]
        est = brownian_oracle_estimate(u, 30000, seed=0)
        rep = compare_prediction(est, fbm_sup_unit_interval(0.5))
        assert rep.verdict == tailfit.CONSISTENT
        zu = np.abs(rep.z_scores)
        assert zu[0] > zu[-1]

    def test_doubled_beta_inconsistent(self):
        pred = fbm_sup_unit_interval(0.5)
        wrong = WeibullTail(pred.alpha, 2 * pred.beta, pred.gamma,
                            pred.big_c)
        est = brownian_oracle_estimate([2.0, 2.5, 3.0, 3.5, 4.0],
                                       1_000_000, seed=1)
        assert compare_prediction(est, wrong).verdict == tailfit.INCONSISTENT

    def test_sparse_data_inconclusive(self):
        est = brownian_oracle_estimate([3.0, 3.5, 4.0], 300, seed=2)
        rep = compare_prediction(est, fbm_sup_unit_interval(0.5))
        assert rep.verdict == tailfit.INCONCLUSIVE
        assert "usable" in rep.note

    def test_bulk_probability_inconclusive_with_note(self):
        est = TailEstimate(np.array([0.1, 2.0]), np.array([0.7, 0.01]),
                           np.array([0.001, 0.001]), 100000, 0.0)
        rep = compare_prediction(est, fbm_sup_unit_interval(0.5))
        assert rep.verdict == tailfit.INCONCLUSIVE
        assert "tail regime" in rep.note

    def test_zero_hits_get_infinite_z(self):
        est = TailEstimate(np.array([2.0, 3.0, 8.0]),
                           np.array([0.05, 0.003, 0.0]),
                           np.array([0.001, 0.0002, 0.0]), 10000, 0.0)
        rep = compare_prediction(est, fbm_sup_unit_interval(0.5))
        assert np.isinf(rep.z_scores[-1])
        assert np.isfinite(rep.z_scores[:-1]).all()

    def test_z_score_hand_value(self):
        pred = WeibullTail(1.0, 1.0, 0.0, 1.0)
        n = 10000
        p_hat = np.array([2 * math.exp(-2.0)])
        est = TailEstimate(np.array([2.0]), p_hat,
                           np.sqrt(p_hat * (1 - p_hat) / n), n, 0.0)
        rep = compare_prediction(est, pred)
        want = math.log(2.0) / math.sqrt((1 - p_hat[0]) / (n * p_hat[0]))
        assert rep.z_scores[0] == pytest.approx(want, rel=1e-12)


class TestReportSerialization:
    def test_json_and_csv(self):
        est = brownian_oracle_estimate([2.0, 2.5, 3.0, 3.5], 100000, seed=3)
        rep = compare_prediction(est, fbm_sup_unit_interval(0.5))
        d = rep.to_json_dict()
        assert set(d) == {"predicted", "thresholds", "z_scores", "verdict",
                          "alpha_hat", "beta_hat", "note"}
        assert d["predicted"]["alpha"] == 2.0
        row = rep.to_csv_row()
        assert row.count(",") == rep.CSV_HEADER.count(",")
        assert rep.verdict in row

    def test_param_fit_validation(self):
        with pytest.raises(ValueError):
            ParamFit(1.0, 2.0, 3.0)
        with pytest.raises(ValueError):
            ParamFit(1.0, 0.5, math.inf)
        assert ParamFit(1.0, 0.5, 1.5).covers(0.75)


class TestSyntheticGenerator:
    def test_rejects_formula_above_one(self):
        heavy = WeibullTail(0.5, 0.1, 3.0, 5.0)
        with pytest.raises(ValueError, match="outside the modeled regime"):
            synthetic_tail_estimate(heavy, [1.1], 100)

    def test_deterministic(self):
        tail = WeibullTail(1.0, 1.0, 0.0, 1.0)
        a = synthetic_tail_estimate(tail, [2, 3], 1000, seed=7)
        b = synthetic_tail_estimate(tail, [2, 3], 1000, seed=7)
        np.testing.assert_array_equal(a.p_hat, b.p_hat)
