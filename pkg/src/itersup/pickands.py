"""The occupation constant H entering every stationary-case prefactor.

H is the large-horizon limit of (1/T) E exp(sup over [0,T] of
sqrt(2) B_{alpha/2}(t) - t^alpha).  Exact values exist at alpha = 1 (1)
and alpha = 2 (1/sqrt(pi)); every other alpha needs Monte Carlo.

The expectation is heavy-tailed: exp(sup) pairs an exponential payoff
with an exponentially small probability, so at useful horizons a plain
sample mean is dominated by paths it will never see and stalls far below
the limit.  The default estimator therefore evaluates the same grid
functional under an equal-weight mixture of exponentially tilted path
laws, one per payoff level, reweighted by exact likelihood ratios; it is
unbiased for the grid expectation and its strata give the standard
error.  The plain estimator remains available as method="crude" for
small horizons and as the reference the tilted one must agree with.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from itersup import _kernels as kern
from itersup import paths
from itersup.rng import philox_stream

DEFAULT_HORIZON = 50.0
DEFAULT_MESH = 2.0 ** -8
DEFAULT_N_REPS = 100_000
_LEVEL_STEP = 2.0
_BLOCK_ROWS = 256
_SQRT2 = math.sqrt(2.0)

EXACT_VALUES = {1.0: 1.0, 2.0: 1.0 / math.sqrt(math.pi)}


class EstimateOverflowWarning(UserWarning):
    """Some replications produced non-finite payoffs and were discarded."""


@dataclass(frozen=True)
class PickandsEstimate:
    alpha: float
    value: float
    std_err: float
    horizon: float
    mesh: float
    n_reps: int
    is_exact: bool
    method: str = "tilted"

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"constant must be positive, got {self.value}")
        if self.is_exact and self.alpha not in EXACT_VALUES:
            raise ValueError(f"no exact value at alpha={self.alpha}")

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "value": self.value,
            "std_err": self.std_err,
            "horizon": self.horizon,
            "mesh": self.mesh,
            "n_reps": self.n_reps,
            "is_exact": self.is_exact,
        }


def _covariance_curve(times: np.ndarray, s: float, alpha: float) -> np.ndarray:
    return 0.5 * (times ** alpha + s ** alpha - np.abs(times - s) ** alpha)


def _level_plan(alpha: float, horizon: float, mesh: float, n: int):
    """Tilt levels, their snapped anchor times, and tilt coefficients.

    Level j targets payoff exponent x_j; its anchor time is where the
    drift equals x_j (capped at the horizon) snapped onto the grid, so the
    measure change is exact for the simulated grid law.
    """
    spread = 2.0 * math.sqrt(2.0 * horizon ** alpha)
    x_max = horizon ** alpha + spread
    j_count = max(1, int(math.ceil(x_max / _LEVEL_STEP)))
    x = (np.arange(1, j_count + 1)) * (x_max / j_count)
    s_cont = np.minimum(x ** (1.0 / alpha), horizon)
    idx = np.clip(np.round(s_cont / mesh).astype(np.int64), 1, n)
    s = idx * mesh
    c = (x + s ** alpha) / (_SQRT2 * s ** alpha)
    kappa = 0.5 * c ** 2 * s ** alpha
    return x, s, idx, c, kappa


def _tilted_estimate(alpha: float, horizon: float, mesh: float, n_reps: int,
                     seed: int) -> tuple[float, float, int]:
    h = alpha / 2.0
    n = int(round(horizon / mesh))
    times = np.arange(1, n + 1) * mesh
    drift = times ** alpha
    _, s, idx, c, kappa = _level_plan(alpha, horizon, mesh, n)
    j_count = len(s)
    strata = j_count + 1
    base, extra = divmod(n_reps, strata)
    log_norm = math.log(strata)

    means = np.empty(strata)
    variances = np.empty(strata)
    counts = np.empty(strata, dtype=np.int64)
    dropped = 0
    for k in range(strata):
        rows_total = base + (1 if k < extra else 0)
        if rows_total == 0:
            raise ValueError(
                f"n_reps={n_reps} cannot cover {strata} mixture strata")
        if k == 0:
            shift = np.zeros(n)
        else:
            shift = _SQRT2 * c[k - 1] * _covariance_curve(
                times, float(s[k - 1]), alpha)
        gen = philox_stream(seed, k)
        vals = np.empty(rows_total)
        done = 0
        while done < rows_total:
            rows = min(_BLOCK_ROWS, rows_total - done)
            inc, _ = paths.fgn_block(h, n, mesh, gen, rows)
            inc *= _SQRT2
            m_vals, s_vals = kern.pickands_scores(inc, shift, drift, idx - 1)
            ell = (s_vals / _SQRT2) * c[None, :] - kappa[None, :]
            log_den = np.logaddexp(0.0, logsumexp(ell, axis=1)) - log_norm
            vals[done:done + rows] = np.exp(m_vals - log_den)
            done += rows
        finite = np.isfinite(vals)
        dropped += rows_total - int(finite.sum())
        kept = vals[finite]
        if len(kept) == 0:
            raise RuntimeError(
                f"every replication in mixture stratum {k} overflowed")
        counts[k] = len(kept)
        means[k] = kept.mean()
        variances[k] = kept.var(ddof=1) if len(kept) > 1 else 0.0
    if dropped:
        warnings.warn(
            f"discarded {dropped} non-finite replications out of {n_reps}",
            EstimateOverflowWarning, stacklevel=3)
    value = float(means.mean() / horizon)
    var = float((variances / counts).sum() / strata ** 2 / horizon ** 2)
    return value, math.sqrt(var), n_reps - dropped


def _crude_estimate(alpha: float, horizon: float, mesh: float, n_reps: int,
                    seed: int) -> tuple[float, float, int]:
    h = alpha / 2.0
    n = int(round(horizon / mesh))
    times = np.arange(1, n + 1) * mesh
    drift = times ** alpha
    zero_shift = np.zeros(n)
    gen = philox_stream(seed, 0)
    vals = np.empty(n_reps)
    done = 0
    while done < n_reps:
        rows = min(_BLOCK_ROWS, n_reps - done)
        inc, _ = paths.fgn_block(h, n, mesh, gen, rows)
        inc *= _SQRT2
        m_vals, _ = kern.pickands_scores(inc, zero_shift, drift,
                                         np.array([0]))
        vals[done:done + rows] = np.exp(m_vals)
        done += rows
    finite = np.isfinite(vals)
    dropped = n_reps - int(finite.sum())
    if dropped:
        warnings.warn(
            f"discarded {dropped} non-finite replications out of {n_reps}",
            EstimateOverflowWarning, stacklevel=3)
    kept = vals[finite]
    value = float(kept.mean() / horizon)
    se = float(kept.std(ddof=1) / math.sqrt(len(kept)) / horizon)
    return value, se, len(kept)


def pickands_constant(alpha: float, horizon: float = DEFAULT_HORIZON,
                      mesh: float = DEFAULT_MESH,
                      n_reps: int = DEFAULT_N_REPS, seed: int = 0,
                      method: str = "auto") -> PickandsEstimate:
    """Exact or Monte Carlo value of the constant H_alpha, alpha in (0,2].

    method="auto" returns the classical closed form at alpha in {1, 2} and
    estimates otherwise; "exact" insists on a closed form, "tilted" and
    "crude" force the corresponding estimator.  Estimates record the
    horizon and mesh they were computed at so downstream consumers can
    flag provenance.
    """
    if not 0 < alpha <= 2:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    if method not in ("auto", "exact", "tilted", "crude"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("auto", "exact") and alpha in EXACT_VALUES:
        return PickandsEstimate(alpha, EXACT_VALUES[alpha], 0.0,
                                horizon=0.0, mesh=0.0, n_reps=0,
                                is_exact=True, method="exact")
    if method == "exact":
        raise ValueError(f"no closed form at alpha={alpha}; use an estimator")
    if not horizon > 0 or not mesh > 0:
        raise ValueError("horizon and mesh must be positive")
    if n_reps <= 0:
        raise ValueError("n_reps must be positive")
    run = _crude_estimate if method == "crude" else _tilted_estimate
    value, se, kept = run(alpha, horizon, mesh, n_reps, seed)
    return PickandsEstimate(alpha, value, se, horizon=horizon, mesh=mesh,
                            n_reps=kept, is_exact=False,
                            method="crude" if method == "crude" else "tilted")
