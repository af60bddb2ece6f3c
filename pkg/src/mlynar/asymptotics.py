"""Scaled gain ``H_n = G_n / sqrt(n)`` and its Rayleigh(1) limit."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distribution import (
    FaceCount,
    Probability,
    _log_factors,
    cdf,
    mean,
    variance,
)

__all__ = [
    "LIMIT_MEAN",
    "LIMIT_VARIANCE",
    "DistanceReport",
    "ScaledStats",
    "asymptotic_mean",
    "asymptotic_scaled_mean",
    "asymptotic_scaled_variance",
    "kolmogorov_distance",
    "rayleigh_cdf",
    "scaled_cdf",
    "scaled_stats",
    "scaled_variance_limit",
]

LIMIT_MEAN = math.sqrt(math.pi / 2)
LIMIT_VARIANCE = 2 - math.pi / 2

_BLOCK = 1 << 20
# Jumps beyond sqrt(2 n * 36) sit where both Q_n and R are within 1e-15 of 1.
_TAIL_LOG = 36.0


@dataclass(frozen=True)
class ScaledStats:
    n: int
    h: float
    v: float
    delta: float


@dataclass(frozen=True)
class DistanceReport:
    n: int
    d: float
    argmax_x: float


def scaled_stats(n: int) -> ScaledStats:
    n = FaceCount(n)
    g = mean(n)
    h = g / math.sqrt(n)
    v = variance(n) / n
    return ScaledStats(n=int(n), h=h, v=v, delta=LIMIT_MEAN - h)


def asymptotic_mean(n: int) -> float:
    """Three-term large-``n`` expansion of the expected gain."""
    n = FaceCount(n)
    return math.sqrt(n * math.pi / 2) - 1 / 3 + math.sqrt(2 * math.pi) / (24 * math.sqrt(n))


def asymptotic_scaled_mean(n: int) -> float:
    """Two-term expansion ``sqrt(pi/2) - 1/(3 sqrt(n))`` of ``E[H_n]``."""
    n = FaceCount(n)
    return LIMIT_MEAN - 1 / (3 * math.sqrt(n))


def asymptotic_scaled_variance(n: int) -> float:
    n = FaceCount(n)
    return LIMIT_VARIANCE - math.sqrt(math.pi / (18 * n))


def scaled_variance_limit() -> float:
    return LIMIT_VARIANCE


def rayleigh_cdf(x: float) -> Probability:
    x = float(x)
    if math.isnan(x):
        raise ValueError("rayleigh_cdf undefined at NaN")
    if x <= 0:
        return Probability.zero()
    return Probability.complement_of_log(-x * x / 2)


def scaled_cdf(x: float, n: int) -> Probability:
    """Cdf of ``H_n``: ``Q_n(x) = P(G_n <= x sqrt(n))``."""
    n = FaceCount(n)
    return cdf(float(x) * math.sqrt(n), n)


def kolmogorov_distance(n: int) -> DistanceReport:
    """``sup_x |Q_n(x) - R(x)|`` evaluated exactly on the jump points.

    Between jumps ``Q_n`` is constant and ``R`` increases, so the sup on
    each interval is reached at one of its ends: compare ``R(k / sqrt n)``
    with both the left limit ``1 - P_k`` and the value ``1 - P_{k+1}``.
    """
    n = FaceCount(n)
    root = math.sqrt(n)
    last = min(n, math.ceil(math.sqrt(2 * n * _TAIL_LOG)) + 1)
    best, best_x = 0.0, 0.0
    log_p = 0.0  # log P_k at the start of the block
    k0 = 1
    while k0 <= last:
        k1 = min(last, k0 + _BLOCK - 1)
        k = np.arange(k0, k1 + 1, dtype=np.float64)
        # log P_{k+1} for each k in the block.
        log_next = log_p + np.cumsum(_log_factors(k, n))
        log_here = np.concatenate(([log_p], log_next[:-1]))
        x = k / root
        r = -np.expm1(-x * x / 2)
        right = np.abs(-np.expm1(log_next) - r)
        left = np.abs(-np.expm1(log_here) - r)
        gap = np.maximum(left, right)
        j = int(np.argmax(gap))
        if gap[j] > best:
            best, best_x = float(gap[j]), float(x[j])
        log_p = float(log_next[-1])
        k0 = k1 + 1
    return DistanceReport(n=int(n), d=best, argmax_x=best_x)
