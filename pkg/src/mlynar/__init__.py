"""Gain distribution of the generalised Mlynar dice game and its Rayleigh limit."""

__version__ = "0.1.0"

from .asymptotics import (
    LIMIT_MEAN,
    LIMIT_VARIANCE,
    DistanceReport,
    ScaledStats,
    asymptotic_mean,
    kolmogorov_distance,
    rayleigh_cdf,
    scaled_cdf,
    scaled_stats,
    scaled_variance_limit,
)
from .distribution import (
    FaceCount,
    ModeResult,
    MomentReport,
    PmfTable,
    Probability,
    cdf,
    mean,
    mean_exact,
    modes,
    moments,
    pmf_exact,
    pmf_explicit,
    pmf_recursive,
    survival_sum,
    truncation_index,
    variance,
    variance_exact,
)
from .errors import MlynarError
from .sampler import GameTrace, RandomSource, SampleStats, play_game, run_batch, sample_inverse
from .study import (
    FitResult,
    GridSpec,
    brute_force_pmf,
    delta_curve,
    distance_curve,
    fit_power_law,
)
