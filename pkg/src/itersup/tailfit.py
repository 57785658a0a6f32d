"""Weighted tail-parameter fits and consistency scoring.

Everything here is leading-order: the tail model C u^gamma exp(-beta u^alpha)
is linearized as -log p = beta u^alpha - gamma log u - log C, the shape
comes from a log-log slope, and the decay rate from a one-parameter
regression with gamma and C supplied by a prediction, never jointly
estimated.  Weights are delta-method variances of log pHat from binomial
counts; thresholds resting on fewer than 20 exceedances are dropped.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from itersup.mc import TailEstimate
from itersup.weibull import WeibullTail

_MIN_HITS = 20
_Z95 = 1.959963984540054
CONSISTENT = "CONSISTENT"
INCONCLUSIVE = "INCONCLUSIVE"
INCONSISTENT = "INCONSISTENT"


class SparseFitWarning(UserWarning):
    """A fit ran on fewer points than comfortable."""


@dataclass(frozen=True)
class ParamFit:
    value: float
    low: float
    high: float

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high)):
            raise ValueError("confidence interval must be finite")
        if not self.low <= self.value <= self.high:
            raise ValueError("estimate must lie inside its interval")

    def covers(self, x: float) -> bool:
        return self.low <= x <= self.high


@dataclass(frozen=True)
class FitReport:
    predicted: WeibullTail
    thresholds: np.ndarray
    z_scores: np.ndarray
    verdict: str
    alpha_fit: ParamFit | None
    beta_fit: ParamFit | None
    note: str = ""

    def to_json_dict(self) -> dict:
        def pf(p):
            return None if p is None else {"value": p.value, "low": p.low,
                                           "high": p.high}
        return {
            "predicted": self.predicted.to_json_dict(),
            "thresholds": [float(u) for u in self.thresholds],
            "z_scores": [float(z) for z in self.z_scores],
            "verdict": self.verdict,
            "alpha_hat": pf(self.alpha_fit),
            "beta_hat": pf(self.beta_fit),
            "note": self.note,
        }

    CSV_HEADER = ("alpha_hat,alpha_low,alpha_high,beta_hat,beta_low,"
                  "beta_high,final_z,verdict")

    def to_csv_row(self) -> str:
        def cells(p):
            return ["", "", ""] if p is None else [repr(p.value),
                                                   repr(p.low), repr(p.high)]
        fz = repr(float(self.z_scores[-1])) if len(self.z_scores) else ""
        return ",".join(cells(self.alpha_fit) + cells(self.beta_fit)
                        + [fz, self.verdict])


def _usable_mask(est: TailEstimate) -> np.ndarray:
    if np.any(est.p_hat >= 0.5):
        bad = est.thresholds[est.p_hat >= 0.5]
        raise ValueError(
            f"pHat >= 0.5 at u={bad.tolist()}: not in the tail regime")
    return est.p_hat * est.n_reps >= _MIN_HITS


def _log_p_variance(p: np.ndarray, n: int) -> np.ndarray:
    return (1.0 - p) / (n * p)


def _misfit_inflation(w: np.ndarray, resid: np.ndarray, dof: int) -> float:
    """Scale factor for intervals when the model underfits the data.

    The nominal intervals treat the delta-method variances as exact; the
    tail model is only leading-order, so intervals are widened by
    sqrt(chi2/dof) whenever the weighted residuals exceed their nominal
    size.  Exactly specified models are unaffected (factor ~ 1).
    """
    if dof < 1:
        return 1.0
    chi2 = float((w * resid ** 2).sum())
    return math.sqrt(max(1.0, chi2 / dof))


def estimate_alpha(est: TailEstimate) -> ParamFit:
    """Shape exponent from the slope of log(-log pHat) against log u.

    Valid to leading order: -log p ~ beta u^alpha dominates the slowly
    varying gamma log u + log C.  Needs at least 4 thresholds with 20+
    exceedances; any pHat >= 0.5 is refused outright.
    """
    keep = _usable_mask(est)
    if keep.sum() < 4:
        raise ValueError(
            f"need at least 4 usable thresholds, have {int(keep.sum())}")
    u = est.thresholds[keep]
    p = est.p_hat[keep]
    x = np.log(u)
    neg_log_p = -np.log(p)
    y = np.log(neg_log_p)
    var_y = _log_p_variance(p, est.n_reps) / neg_log_p ** 2
    w = 1.0 / var_y
    xbar = (w * x).sum() / w.sum()
    sxx = (w * (x - xbar) ** 2).sum()
    slope = (w * (x - xbar) * y).sum() / sxx
    ybar = (w * y).sum() / w.sum()
    resid = y - ybar - slope * (x - xbar)
    half = (_Z95 / math.sqrt(sxx)
            * _misfit_inflation(w, resid, len(y) - 2))
    return ParamFit(slope, slope - half, slope + half)


def fit_beta_given_alpha(est: TailEstimate, alpha: float, gamma: float,
                         big_c: float | None = None
                         ) -> tuple[ParamFit, float | None]:
    """Decay rate with the shape fixed; returns (betaFit, cHat).

    With ``big_c`` supplied the corrected response
    -log pHat + gamma log u + log C is regressed on u^alpha through the
    origin; with ``big_c=None`` the prefactor is absorbed into a free
    intercept and returned as cHat.  Two usable points suffice (warned
    below four).
    """
    keep = _usable_mask(est)
    n_use = int(keep.sum())
    if n_use < 2:
        raise ValueError(f"need at least 2 usable thresholds, have {n_use}")
    if n_use < 4:
        warnings.warn(f"beta fit on only {n_use} thresholds",
                      SparseFitWarning, stacklevel=2)
    u = est.thresholds[keep]
    p = est.p_hat[keep]
    x = u ** alpha
    w = 1.0 / _log_p_variance(p, est.n_reps)
    if big_c is not None:
        if not big_c > 0:
            raise ValueError(f"prefactor must be positive, got {big_c}")
        y = -np.log(p) + gamma * np.log(u) + math.log(big_c)
        sxx = (w * x * x).sum()
        beta = (w * x * y).sum() / sxx
        half = (_Z95 / math.sqrt(sxx)
                * _misfit_inflation(w, y - beta * x, len(y) - 1))
        return ParamFit(beta, beta - half, beta + half), None
    y = -np.log(p) + gamma * np.log(u)
    xbar = (w * x).sum() / w.sum()
    ybar = (w * y).sum() / w.sum()
    sxx = (w * (x - xbar) ** 2).sum()
    beta = (w * (x - xbar) * (y - ybar)).sum() / sxx
    intercept = ybar - beta * xbar
    half = (_Z95 / math.sqrt(sxx)
            * _misfit_inflation(w, y - intercept - beta * x, len(y) - 2))
    return ParamFit(beta, beta - half, beta + half), math.exp(-intercept)


def compare_prediction(est: TailEstimate, predicted: WeibullTail) -> FitReport:
    """Score an empirical tail against a closed-form prediction.

    z-scores compare log pHat with the predicted log tail threshold by
    threshold.  The deterministic verdict rule: CONSISTENT when |z| at the
    last usable threshold is below 3, below its value at the first, and
    the conditional beta interval covers the predicted beta; INCONSISTENT
    when the final |z| exceeds 6; INCONCLUSIVE otherwise or when too
    sparse to fit.  The beta fit here leaves the prefactor free, so a
    pre-asymptotic offset shared by all thresholds cannot masquerade as a
    decay-rate discrepancy.
    """
    defined = est.p_hat > 0
    z = np.full(len(est.thresholds), np.inf)
    if defined.any():
        p = est.p_hat[defined]
        pred_tail = np.array([predicted.tail(float(u))
                              for u in est.thresholds[defined]])
        sd = np.sqrt(_log_p_variance(p, est.n_reps))
        z[defined] = (np.log(p) - np.log(pred_tail)) / sd
    try:
        keep = _usable_mask(est)
    except ValueError as err:
        return FitReport(predicted, est.thresholds, z, INCONCLUSIVE,
                         None, None, note=str(err))
    alpha_fit = None
    if keep.sum() >= 4:
        alpha_fit = estimate_alpha(est)
    if keep.sum() < 2:
        return FitReport(predicted, est.thresholds, z, INCONCLUSIVE,
                         alpha_fit, None,
                         note="fewer than 2 usable thresholds")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SparseFitWarning)
        beta_fit, _ = fit_beta_given_alpha(est, predicted.alpha,
                                           predicted.gamma, None)
    zu = np.abs(z[keep])
    if zu[-1] > 6:
        verdict = INCONSISTENT
    elif zu[-1] < 3 and zu[-1] < zu[0] and beta_fit.covers(predicted.beta):
        verdict = CONSISTENT
    else:
        verdict = INCONCLUSIVE
    return FitReport(predicted, est.thresholds, z, verdict, alpha_fit,
                     beta_fit)


def synthetic_tail_estimate(tail: WeibullTail, thresholds, n_reps: int,
                            seed: int = 0) -> TailEstimate:
    """Binomial resampling of an exact tail; the round-trip test generator."""
    thresholds = np.atleast_1d(np.asarray(thresholds, dtype=float))
    gen = np.random.default_rng(seed)
    p_true = np.array([tail.tail(float(u)) for u in thresholds])
    if np.any(p_true > 1):
        raise ValueError("tail formula exceeds 1 at these thresholds; "
                         "they are outside the modeled regime")
    counts = gen.binomial(n_reps, p_true)
    p_hat = counts / n_reps
    se = np.sqrt(p_hat * (1 - p_hat) / n_reps)
    return TailEstimate(thresholds, p_hat, se, n_reps, 0.0, "SYNTHETIC")
