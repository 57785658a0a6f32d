"""itersup: tail asymptotics and simulation for suprema of iterated processes.

The package pairs closed-form Weibull-type tail parameters for suprema of
time-changed Gaussian processes (``itersup.weibull``) with the Monte Carlo
machinery needed to check them: exact Gaussian path simulation
(``itersup.paths``), tail estimation (``itersup.mc``), Pickands constant
estimation (``itersup.pickands``), tail-parameter regression
(``itersup.tailfit``), and long-time-horizon limits (``itersup.longtime``).
``itersup.acceptance`` bundles the end-to-end checks; the ``itersup`` CLI
exposes everything from the shell.
"""
from itersup.weibull import (
    Case,
    CaseSelector,
    PowerLawVariance,
    WeibullTail,
    combine_extremes,
    fbm_randomized_sup,
    fbm_sup_unit_interval,
    iterated_fbm_sup,
    iterated_fbm_sup_composed,
    normal_upper_tail,
    randomized_sup_transform,
    selfsimilar_rescale,
    stationary_sup_asymptotic,
    weibull_tail_eval,
)

__version__ = "0.1.0"

__all__ = [
    "Case",
    "CaseSelector",
    "PowerLawVariance",
    "WeibullTail",
    "combine_extremes",
    "fbm_randomized_sup",
    "fbm_sup_unit_interval",
    "iterated_fbm_sup",
    "iterated_fbm_sup_composed",
    "normal_upper_tail",
    "randomized_sup_transform",
    "selfsimilar_rescale",
    "stationary_sup_asymptotic",
    "weibull_tail_eval",
    "__version__",
]
