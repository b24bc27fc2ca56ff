"""Absorption times of decreasing integer Markov chains: exact laws,
renewal approximations, and Wasserstein convergence diagnostics."""

__version__ = "0.1.0"

from .dist import AffineView, LatticeDist, convolve, truncate_at
from .laws import NormalLaw, normal_cdf, normal_quantile
from .stable import StableLaw, stable_cdf, stable_law, stable_quantile
from .wasserstein import (DistanceReport, d1_discrete_vs_continuous,
                          d2_discrete_vs_continuous, dp_discrete, dp_empirical,
                          kr_dual_oracle)
from .models import DecrementModel, beta_coalescent_limit, coupling_gap, make_model
from .absorb import (AbsorptionTable, PruneBudgetError, absorption_law,
                     absorption_mean, build_table, simulate_absorption)
from .renewal import (StationaryDelay, additive_count_law, mult_count_sample,
                      mult_count_samples, stationary_delay_quantile)
from .limits import Normalization, NumericError, normalizer_c, theorem_normalization
from .experiment import ExperimentConfig, run_bounds, run_convergence, run_mc

__all__ = [
    "AbsorptionTable", "AffineView", "DecrementModel", "DistanceReport",
    "ExperimentConfig", "LatticeDist", "NormalLaw", "Normalization",
    "NumericError", "PruneBudgetError", "StableLaw", "StationaryDelay",
    "absorption_law", "absorption_mean", "additive_count_law",
    "beta_coalescent_limit", "build_table", "convolve", "coupling_gap",
    "d1_discrete_vs_continuous", "d2_discrete_vs_continuous", "dp_discrete",
    "dp_empirical", "kr_dual_oracle", "make_model", "mult_count_sample",
    "mult_count_samples", "normal_cdf", "normal_quantile", "normalizer_c",
    "run_bounds", "run_convergence", "run_mc", "simulate_absorption",
    "stable_cdf", "stable_law", "stable_quantile", "stationary_delay_quantile",
    "theorem_normalization", "truncate_at",
]
