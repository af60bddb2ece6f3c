"""Numerical studies: the Delta(n) power law, Rayleigh distance, enumeration oracle."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .asymptotics import LIMIT_MEAN, kolmogorov_distance
from .distribution import FaceCount, mean
from .errors import (
    DegenerateFit,
    ExponentTooLarge,
    MlynarError,
    NonpositiveDelta,
    TooLargeForEnumeration,
)

__all__ = [
    "DELTA_MAX_EXPONENT",
    "DISTANCE_MAX_EXPONENT",
    "ENUMERATION_MAX_N",
    "DECADE_GRID",
    "FitResult",
    "GridSpec",
    "brute_force_counts",
    "brute_force_pmf",
    "conjecture_table",
    "delta_curve",
    "distance_curve",
    "fit_power_law",
]

DELTA_MAX_EXPONENT = 15
DISTANCE_MAX_EXPONENT = 8
ENUMERATION_MAX_N = 8


@dataclass(frozen=True)
class GridSpec:
    """Decades ``n = 10**e`` to evaluate, strictly increasing ``e >= 0``."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if not exps:
            raise MlynarError("grid must contain at least one exponent")
        if exps[0] < 0 or any(b <= a for a, b in zip(exps, exps[1:])):
            raise MlynarError(f"grid exponents must be >= 0 and strictly increasing: {exps}")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"1..10"`` or ``"2,4,6"`` (ranges and lists may be mixed)."""
        exps: list[int] = []
        for part in text.split(","):
            part = part.strip()
            m = re.fullmatch(r"(\d+)\.\.(\d+)", part)
            if m:
                exps.extend(range(int(m[1]), int(m[2]) + 1))
            elif re.fullmatch(r"\d+", part):
                exps.append(int(part))
            else:
                raise MlynarError(f"cannot parse grid element {part!r}")
        return cls(tuple(exps))

    @property
    def values(self) -> list[int]:
        return [10**e for e in self.exponents]

    def require_max(self, cap: int) -> None:
        if self.exponents[-1] > cap:
            raise ExponentTooLarge(f"grid exponent {self.exponents[-1]} exceeds {cap}")


DECADE_GRID = GridSpec(tuple(range(1, 11)))


@dataclass(frozen=True)
class FitResult:
    alpha: float
    beta: float
    alpha_se: float
    beta_se: float
    c: float
    c_se: float
    n_points: int
    dof: int
    degenerate_dof: bool = False


def delta_curve(grid: GridSpec) -> list[tuple[int, float]]:
    """``Delta(n) = sqrt(pi/2) - g(n)/sqrt(n)`` on the grid."""
    grid.require_max(DELTA_MAX_EXPONENT)
    return [(n, LIMIT_MEAN - mean(n) / math.sqrt(n)) for n in grid.values]


def conjecture_table(grid: GridSpec) -> list[tuple[int, float, float, float]]:
    """Rows ``(n, h, Delta, Delta * sqrt(n))``."""
    rows = []
    for n, delta in delta_curve(grid):
        rows.append((n, LIMIT_MEAN - delta, delta, delta * math.sqrt(n)))
    return rows


def fit_power_law(points) -> FitResult:
    """Unweighted least squares of ``log10 Delta`` on ``log10 n``.

    Standard errors come from the residual variance with ``n_points - 2``
    degrees of freedom.  With exactly two points the line is exact and the
    errors are reported as 0 with ``degenerate_dof`` set.
    """
    points = list(points)
    if len(points) < 2:
        raise DegenerateFit("need at least two points")
    n = np.array([p[0] for p in points], dtype=float)
    delta = np.array([p[1] for p in points], dtype=float)
    if np.any(delta <= 0) or np.any(n <= 0):
        raise NonpositiveDelta("power-law fit requires positive n and Delta")
    x = np.log10(n)
    y = np.log10(delta)
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0.0:
        raise DegenerateFit("all abscissae are equal")
    beta = float(np.sum((x - xm) * (y - ym)) / sxx)
    alpha = float(ym - beta * xm)
    dof = len(points) - 2
    if dof > 0:
        resid = y - (alpha + beta * x)
        s2 = float(np.sum(resid**2)) / dof
        beta_se = math.sqrt(s2 / sxx)
        alpha_se = math.sqrt(s2 * (1 / len(points) + xm**2 / sxx))
    else:
        beta_se = alpha_se = 0.0
    c = 10.0**alpha
    return FitResult(
        alpha=alpha,
        beta=beta,
        alpha_se=alpha_se,
        beta_se=beta_se,
        c=c,
        c_se=c * math.log(10) * alpha_se,
        n_points=len(points),
        dof=dof,
        degenerate_dof=dof == 0,
    )


def distance_curve(grid: GridSpec) -> list[tuple[int, float]]:
    """Kolmogorov distance ``d(n)`` to Rayleigh(1) on the grid."""
    grid.require_max(DISTANCE_MAX_EXPONENT)
    return [(n, kolmogorov_distance(n).d) for n in grid.values]


def brute_force_counts(n: int) -> list[int]:
    """Number of the ``n**(n-1)`` equally likely throw paths ending with each gain."""
    n = FaceCount(n)
    if n > ENUMERATION_MAX_N:
        raise TooLargeForEnumeration(f"enumeration limited to n <= {ENUMERATION_MAX_N}")
    length = n - 1
    if length == 0:
        return [1]
    codes = np.arange(n**length, dtype=np.int64)
    # digit j of the base-n code is throw X_{j+1} - 1
    throws = np.empty((codes.size, length), dtype=np.int64)
    for j in range(length):
        throws[:, j] = codes // n ** (length - 1 - j) % n + 1
    stops = throws <= np.arange(1, length + 1)
    gains = np.where(stops.any(axis=1), stops.argmax(axis=1) + 1, n)
    return np.bincount(gains, minlength=n + 1)[1:].tolist()


def brute_force_pmf(n: int) -> list[Fraction]:
    n = FaceCount(n)
    counts = brute_force_counts(n)
    total = n ** (n - 1)
    return [Fraction(c, total) for c in counts]
