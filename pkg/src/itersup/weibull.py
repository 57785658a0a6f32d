"""Closed-form tail algebra for suprema of time-changed Gaussian processes.

The central object is the four-parameter tail class W(alpha, beta, gamma, C):
laws T with P(T > u) = C * u**gamma * exp(-beta * u**alpha) * (1 + o(1)).
This module evaluates such tails, decides which of two tails dominates,
and maps tail parameters through the supremum-of-composition transforms:
a generic power-law-variance outer process, a fractional Brownian outer
process, and the fully explicit iterated fractional Brownian case.

All evaluation is plain binary64; tolerances elsewhere are sized for that.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace


class FormalModeWarning(UserWarning):
    """Emitted when a transform is evaluated outside its guaranteed range."""


SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class WeibullTail:
    """Tail parameters (alpha, beta, gamma, C) plus a provenance note.

    ``provenance`` records how the prefactor was obtained; any value other
    than "closed-form" means big_c depends on an injected or estimated
    constant and should not be treated as exact.
    """

    alpha: float
    beta: float
    gamma: float
    big_c: float
    provenance: str = "closed-form"

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not (self.big_c > 0 and math.isfinite(self.big_c)):
            raise ValueError(f"C must be positive, got {self.big_c}")
        if not math.isfinite(self.gamma):
            raise ValueError(f"gamma must be finite, got {self.gamma}")

    def tail(self, u: float) -> float:
        return weibull_tail_eval(self, u)

    def to_json_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma,
                "C": self.big_c, "provenance": self.provenance}


@dataclass(frozen=True)
class PowerLawVariance:
    """Pure power-law variance sigma^2(t) = D * t**alpha_inf."""

    big_d: float
    alpha_inf: float

    def __post_init__(self):
        if not (self.big_d > 0 and math.isfinite(self.big_d)):
            raise ValueError(f"D must be positive, got {self.big_d}")
        if not (0 < self.alpha_inf <= 2):
            raise ValueError(f"alpha_inf must lie in (0, 2], got {self.alpha_inf}")


class Case(enum.Enum):
    M_DOMINATES = "M_DOMINATES"
    K_DOMINATES = "K_DOMINATES"
    PROPORTIONAL = "PROPORTIONAL"


@dataclass(frozen=True)
class CaseSelector:
    variant: Case
    ratio: float | None = None  # C_k / C_m, set only for PROPORTIONAL

    def __post_init__(self):
        if (self.variant is Case.PROPORTIONAL) != (self.ratio is not None):
            raise ValueError("ratio is set exactly for PROPORTIONAL")


def normal_upper_tail(u: float) -> float:
    """P(N > u) for a standard normal N, via the complementary error function."""
    return 0.5 * math.erfc(u / math.sqrt(2.0))


def weibull_tail_eval(w: WeibullTail, u: float) -> float:
    """Leading-order tail value C * u**gamma * exp(-beta * u**alpha).

    Evaluated through a single exp of the log expression so that very deep
    tails underflow to 0.0 instead of producing inf * 0 artifacts.
    """
    if not u > 0:
        raise ValueError(f"threshold must be positive, got {u}")
    log_val = math.log(w.big_c) + w.gamma * math.log(u) - w.beta * u ** w.alpha
    if log_val > 709.0:  # exp overflow threshold for binary64
        return math.inf
    return math.exp(log_val)


def _close(a: float, b: float, rel_tol: float) -> bool:
    return math.isclose(a, b, rel_tol=rel_tol, abs_tol=rel_tol)


def combine_extremes(m: WeibullTail, k: WeibullTail,
                     rel_tol: float = 1e-12) -> tuple[CaseSelector, WeibullTail]:
    """Decide which of two tails dominates a maximum and give the combined tail.

    Comparison is lexicographic in tail heaviness: a smaller alpha is heavier;
    on a tie, a smaller beta; on a tie, a larger gamma.  When (alpha, beta,
    gamma) all agree within ``rel_tol`` the two tails are proportional and the
    prefactors add.  Returns the selected case and the effective tail with
    alpha = min(alpha_m, alpha_k).
    """
    prov = m.provenance if m.provenance == k.provenance else "combined"
    if not _close(m.alpha, k.alpha, rel_tol):
        winner = m if m.alpha < k.alpha else k
    elif not _close(m.beta, k.beta, rel_tol):
        winner = m if m.beta < k.beta else k
    elif not _close(m.gamma, k.gamma, rel_tol):
        winner = m if m.gamma > k.gamma else k
    else:
        sel = CaseSelector(Case.PROPORTIONAL, ratio=k.big_c / m.big_c)
        eff = WeibullTail(min(m.alpha, k.alpha), m.beta, m.gamma,
                          m.big_c + k.big_c, provenance=prov)
        return sel, eff
    sel = CaseSelector(Case.M_DOMINATES if winner is m else Case.K_DOMINATES)
    return sel, replace(winner, alpha=min(m.alpha, k.alpha))


def randomized_sup_transform(t: WeibullTail, v: PowerLawVariance,
                             strict: bool = False) -> WeibullTail:
    """Tail of the supremum of a power-law-variance Gaussian process run up
    to an independent random time with tail ``t``.

    ``strict`` enforces alpha_inf in (1, 2), the range where the result is
    guaranteed; the default formal mode evaluates the algebra anyway and
    warns, since the fBm-specific transforms extend the validity.
    """
    a, b, g, c = t.alpha, t.beta, t.gamma, t.big_c
    d, ai = v.big_d, v.alpha_inf
    if not 1 < ai < 2:
        if strict:
            raise ValueError(
                f"alpha_inf={ai} outside (1, 2); rerun without strict mode "
                "to evaluate the formulas formally")
        warnings.warn(
            f"alpha_inf={ai} outside (1, 2): result is a formal evaluation",
            FormalModeWarning, stacklevel=2)
    s = a + ai
    alpha_t = 2 * a / s
    beta_t = b ** (ai / s) * (d / 2) ** (a / s) * (
        (a / ai) ** (ai / s) + (ai / a) ** (a / s))
    gamma_t = 2 * g / s
    c_t = (c * d ** (-1.0 / ai) * math.sqrt(ai / (2 * s))
           * ((ai / (2 * a * b)) * d ** (ai / a)) ** (g / s))
    return WeibullTail(alpha_t, beta_t, gamma_t, c_t, provenance=t.provenance)


def fbm_sup_unit_interval(h: float, pickands: float | None = None,
                          provenance: str | None = None) -> WeibullTail:
    """Tail of sup of fractional Brownian motion over the unit interval.

    For h >= 1/2 the parameters are fully explicit.  For h < 1/2 the
    prefactor carries the constant H_h, which has no closed form: pass it
    via ``pickands`` (see :mod:`itersup.pickands`); the output provenance
    then flags the injected value.
    """
    if not 0 < h <= 1:
        raise ValueError(f"hurst parameter must lie in (0, 1], got {h}")
    if h > 0.5:
        return WeibullTail(2.0, 0.5, -1.0, 1.0 / SQRT_2PI)
    if h == 0.5:
        return WeibullTail(2.0, 0.5, -1.0, 2.0 / SQRT_2PI)
    if pickands is None:
        raise ValueError(
            "h < 1/2 needs the constant H_h; supply pickands= "
            "(itersup.pickands.pickands_constant can estimate it)")
    if not pickands > 0:
        raise ValueError(f"pickands constant must be positive, got {pickands}")
    c = pickands / (h * math.sqrt(math.pi)) * 2.0 ** (-(h + 1) / (2 * h))
    return WeibullTail(2.0, 0.5, 1.0 / h - 3.0, c,
                       provenance=provenance or "pickands-injected")


def fbm_randomized_sup(h: float, m: WeibullTail, k: WeibullTail,
                       pickands: float | None = None) -> WeibullTail:
    """Tail of sup of a two-sided fBm over the random interval [-K, M].

    ``m`` and ``k`` are the tails of the right and left interval endpoints.
    The two one-sided contributions are first merged by
    :func:`combine_extremes`; the transform below then maps the per-side
    prefactor, which for the proportional case is half the combined C.
    For h < 1/2 the output prefactor carries the constant H_h, supplied
    via ``pickands``.
    """
    if not 0 < h <= 1:
        raise ValueError(f"hurst parameter must lie in (0, 1], got {h}")
    sel, eff = combine_extremes(m, k)
    a, b, g = eff.alpha, eff.beta, eff.gamma
    c_side = eff.big_c / 2 if sel.variant is Case.PROPORTIONAL else eff.big_c
    s = a + 2 * h
    beta_t = b ** (2 * h / s) * (
        0.5 * (a / h) ** (2 * h / s) + (h / a) ** (a / s))
    prov = eff.provenance
    if h < 0.5:
        if pickands is None:
            raise ValueError("h < 1/2 needs the constant H_h via pickands=")
        if not pickands > 0:
            raise ValueError(f"pickands constant must be positive, got {pickands}")
        gamma_t = (2 * a - 3 * a * h + 2 * g) / s
        c_t = (pickands * c_side * 0.5 ** (1 / (2 * h)) / math.sqrt(s)
               * h ** ((a + 6 * h + 2 * g - 2) / (2 * s))
               * (a * b) ** ((1 - 2 * h - g) / s))
        if prov == "closed-form":
            prov = "pickands-injected"
    else:
        gamma_t = 2 * g / s
        c2 = (c_side * math.sqrt(h) / math.sqrt(s)
              * (h / (a * b)) ** (g / s))
        c_t = 2 * c2 if h == 0.5 else c2
    return WeibullTail(2 * a / s, beta_t, gamma_t, c_t, provenance=prov)


def selfsimilar_rescale(w: WeibullTail, scaling_index: float,
                        big_t: float) -> WeibullTail:
    """Map unit-horizon tail parameters to horizon ``big_t``.

    If the underlying supremum over [0, T] equals T**scaling_index times the
    supremum over [0, 1] in law, then evaluating the horizon-T tail at u is
    evaluating the unit tail at u * T**(-scaling_index), which rescales beta
    and C and leaves alpha, gamma alone.
    """
    if not big_t > 0:
        raise ValueError(f"horizon must be positive, got {big_t}")
    s = big_t ** (-scaling_index)
    return replace(w, beta=w.beta * s ** w.alpha, big_c=w.big_c * s ** w.gamma)


def _regime(h: float) -> int:
    if h < 0.5:
        return 0
    return 1 if h == 0.5 else 2


def iterated_fbm_sup(h1: float, h2: float, big_t: float = 1.0,
                     pickands_h1: float | None = None,
                     pickands_h2: float | None = None) -> WeibullTail:
    """Explicit tail of sup over [0, T] of B_h2 composed with B_h1.

    The nine (gamma, C) cases follow the two Hurst regimes (below, at, above
    1/2) of each motion.  Prefactors for h1 < 1/2 carry the constant H_h1
    (supply ``pickands_h1``), and for h2 < 1/2 the constant H_h2
    (``pickands_h2``); outputs then flag estimated provenance.  Horizons
    other than 1 are reached by exact self-similar rescaling with index
    h1 * h2.
    """
    for name, h in (("h1", h1), ("h2", h2)):
        if not 0 < h <= 1:
            raise ValueError(f"{name} must lie in (0, 1], got {h}")
    if not big_t > 0:
        raise ValueError(f"horizon must be positive, got {big_t}")

    hp1 = hp2 = 1.0
    prov = "closed-form"
    if h1 < 0.5:
        if pickands_h1 is None:
            raise ValueError("h1 < 1/2 needs pickands_h1 (constant H_h1)")
        hp1, prov = pickands_h1, "pickands-injected"
    if h2 < 0.5:
        if pickands_h2 is None:
            raise ValueError("h2 < 1/2 needs pickands_h2 (constant H_h2)")
        hp2, prov = pickands_h2, "pickands-injected"

    alpha = 2.0 / (1.0 + h2)
    beta = 0.5 ** (h2 / (1 + h2)) * (
        0.5 * (2 / h2) ** (h2 / (1 + h2)) + (h2 / 2) ** (1 / (1 + h2)))

    g1 = (1 - h1 - 3 * h1 * h2) / (h1 * (1 + h2))
    g2 = (1 - 3 * h1) / (h1 * (1 + h2))
    g3 = (1 - 3 * h2) / (1 + h2)
    g4 = -1.0 / (1 + h2)
    sq = math.sqrt(math.pi * (1 + h2))
    c1 = (hp1 * hp2 / (h1 * sq)
          * 0.5 ** ((h1 + h2 + 2 * h1 * h2) / (2 * h1 * h2))
          * h2 ** ((1 - 3 * h1 + 3 * h1 * h2) / (2 * h1 * (1 + h2))))
    c2 = (hp1 / (h1 * sq) * 0.5 ** (1 / (2 * h1) + 1)
          * h2 ** ((1 - 2 * h1 + h1 * h2) / (2 * h1 * (1 + h2))))
    c3 = (hp2 / sq * 0.5 ** (1 / (2 * h2) - 1)
          * h2 ** ((3 * h2 - 1) / (2 + 2 * h2)))
    c4 = 0.5 / sq * h2 ** (h2 / (2 * (1 + h2)))

    table = {
        (0, 0): (g1, c1), (0, 1): (g2, 2 * c2), (0, 2): (g2, c2),
        (1, 0): (g3, 2 * c3), (1, 1): (g4, 4 * c4), (1, 2): (g4, 2 * c4),
        (2, 0): (g3, c3), (2, 1): (g4, 2 * c4), (2, 2): (g4, c4),
    }
    gamma, big_c = table[(_regime(h1), _regime(h2))]
    unit = WeibullTail(alpha, beta, gamma, big_c, provenance=prov)
    if big_t == 1.0:
        return unit
    return selfsimilar_rescale(unit, h1 * h2, big_t)


def iterated_fbm_sup_composed(h1: float, h2: float, big_t: float = 1.0,
                              pickands_h1: float | None = None,
                              pickands_h2: float | None = None) -> WeibullTail:
    """Same tail as :func:`iterated_fbm_sup`, built from the generic stages.

    The inner motion's unit-interval supremum is rescaled to horizon T by
    self-similarity; its law also governs minus the infimum, so the two
    endpoint tails coincide and feed :func:`fbm_randomized_sup` for the
    outer motion.  Kept separate from the explicit table on purpose: route
    agreement is a load-bearing cross-check, not an implementation detail.
    """
    inner = fbm_sup_unit_interval(h1, pickands_h1)
    endpoint = selfsimilar_rescale(inner, h1, big_t)
    return fbm_randomized_sup(h2, endpoint, endpoint, pickands=pickands_h2)


def stationary_sup_asymptotic(mean_span: float, big_c: float, alpha: float,
                              pickands: float, u: float) -> float:
    """Leading-order tail of sup X(Y(s)) for stationary X with local
    correlation scale (big_c, alpha), driven over a random set of mean span
    ``mean_span``: E(T) * C**(1/alpha) * H_alpha * u**(2/alpha) * Psi(u).
    """
    if mean_span < 0:
        raise ValueError(f"mean span must be nonnegative, got {mean_span}")
    if not big_c > 0:
        raise ValueError(f"C must be positive, got {big_c}")
    if not 0 < alpha <= 2:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    if not pickands > 0:
        raise ValueError(f"pickands constant must be positive, got {pickands}")
    if not u > 0:
        raise ValueError(f"threshold must be positive, got {u}")
    if mean_span == 0:
        return 0.0
    return (mean_span * big_c ** (1 / alpha) * pickands
            * u ** (2 / alpha) * normal_upper_tail(u))
