"""Mlynar distribution: pmf, cdf, survival sums, mode and moments.

The gain ``G_n`` of the hyper-die game has support ``{1, ..., n}`` and

    p_k = k / n**k * (n - 1)! / (n - k)!

Floating-point routines never form factorials.  They work with the
telescoping survival terms

    P_1 = 1,   P_{k+1} = P_k * (n - k) / n,   P_k = sum_{i >= k} p_i

which stay in ``[0, 1]`` for every ``n`` up to ``MAX_N``.  Exact rational
versions (``*_exact``) are provided as oracles for small ``n``.
"""

from __future__ import annotations

import math
import numbers
from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import (
    FullTableTooLarge,
    InvalidEpsilon,
    InvalidFaceCount,
    OutOfSupport,
    TooLargeForExact,
)

__all__ = [
    "DEFAULT_EPSILON",
    "MAX_EXACT",
    "MAX_FULL_TABLE",
    "MAX_N",
    "FaceCount",
    "ModeResult",
    "MomentReport",
    "PmfTable",
    "Probability",
    "cdf",
    "mean",
    "mean_exact",
    "modes",
    "moments",
    "pmf_exact",
    "pmf_explicit",
    "pmf_ratio",
    "pmf_recursive",
    "survival_sum",
    "truncation_index",
    "variance",
    "variance_exact",
]

MAX_N = 10**15
MAX_FULL_TABLE = 10**7
MAX_EXACT = 500
DEFAULT_EPSILON = 1e-18

_BLOCK = 1 << 20
# Longer log-factor sums go through mpmath's loggamma instead of numpy.
_DIRECT_TERMS = 1 << 22


class FaceCount(int):
    """Number of faces ``n`` of the hyper-die, ``1 <= n <= MAX_N``.

    Integral floats such as ``1e10`` are accepted for convenience.
    """

    def __new__(cls, n: object) -> "FaceCount":
        if isinstance(n, bool):
            raise InvalidFaceCount(f"face count must be an integer, got {n!r}")
        if isinstance(n, float) and n.is_integer():
            n = int(n)
        if not isinstance(n, numbers.Integral):
            raise InvalidFaceCount(f"face count must be an integer, got {n!r}")
        n = int(n)
        if n < 1:
            raise InvalidFaceCount(f"face count must be >= 1, got {n}")
        if n > MAX_N:
            raise InvalidFaceCount(f"face count must be <= {MAX_N}, got {n}")
        return super().__new__(cls, n)


@dataclass(frozen=True)
class Probability:
    """A probability together with its natural logarithm.

    ``log_value`` stays meaningful after ``value`` underflows to zero.
    """

    value: float
    log_value: float

    @classmethod
    def from_log(cls, log_value: float) -> "Probability":
        return cls(math.exp(log_value), log_value)

    @classmethod
    def complement_of_log(cls, log_tail: float) -> "Probability":
        """Build ``1 - exp(log_tail)`` without cancellation."""
        tail = math.exp(log_tail)
        if tail >= 1.0:
            return cls(0.0, -math.inf)
        return cls(-math.expm1(log_tail), math.log1p(-tail))

    @classmethod
    def zero(cls) -> "Probability":
        return cls(0.0, -math.inf)

    @classmethod
    def one(cls) -> "Probability":
        return cls(1.0, 0.0)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class PmfTable:
    """Materialised pmf ``p_1 .. p_K``.

    ``probs`` and ``log_probs`` are read-only arrays indexed from 0, so
    ``probs[k - 1]`` is ``P(G_n = k)``.  ``tail_mass`` is the neglected
    probability ``P(G_n > K)``.
    """

    n: int
    probs: np.ndarray
    log_probs: np.ndarray
    truncation_K: int
    truncated: bool
    epsilon: float
    tail_mass: float
    exact: bool = False

    def __len__(self) -> int:
        return self.truncation_K

    def probability(self, k: int) -> Probability:
        if not 1 <= k <= self.truncation_K:
            raise OutOfSupport(f"k={k} outside stored range 1..{self.truncation_K}")
        return Probability(float(self.probs[k - 1]), float(self.log_probs[k - 1]))

    def total(self) -> float:
        return math.fsum(self.probs)


@dataclass(frozen=True)
class ModeResult:
    modes: tuple[int, ...]
    bimodal: bool


@dataclass(frozen=True)
class MomentReport:
    n: int
    mean: float
    variance: float
    scaled_mean: float
    scaled_variance: float
    method: str


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0.0 <= epsilon < 1.0:
        raise InvalidEpsilon(f"epsilon must lie in [0, 1), got {epsilon}")
    return epsilon


def _check_support(k: int, n: int) -> int:
    if isinstance(k, bool) or not isinstance(k, numbers.Integral):
        raise OutOfSupport(f"k must be an integer, got {k!r}")
    k = int(k)
    if not 1 <= k <= n:
        raise OutOfSupport(f"k={k} outside support 1..{n}")
    return k


def _log_factors(i: np.ndarray, n: int) -> np.ndarray:
    # log((n - i) / n); log1p is accurate while i / n is small.
    small = i <= n / 2
    out = np.empty_like(i)
    out[small] = np.log1p(-i[small] / n)
    with np.errstate(divide="ignore"):
        out[~small] = np.log((n - i[~small]) / n)
    return out


def _log_survival(k: int, n: int) -> float:
    """``log P_k = sum_{i=1}^{k-1} log((n - i) / n)`` for ``1 <= k <= n + 1``."""
    m = k - 1
    if m == 0:
        return 0.0
    if m >= n:
        return -math.inf
    if m <= _DIRECT_TERMS:
        return float(np.sum(_log_factors(np.arange(1, m + 1, dtype=np.float64), n)))
    with mpmath.workdps(40):
        return float(mpmath.loggamma(n) - m * mpmath.log(n) - mpmath.loggamma(n - m))


def _survival_blocks(n: int, epsilon: float) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(k0, P)`` with ``P[j] = P_{k0 + j}`` up to the truncation index.

    Term ``k`` is kept while ``P_k >= epsilon * (P_1 + ... + P_{k-1})``, i.e.
    while it still registers in the running sum at relative precision
    ``epsilon``.  ``epsilon = 0`` runs through ``k = n``.
    """
    running = 0.0
    start = 1.0
    k0 = 1
    while True:
        k1 = min(n, k0 + _BLOCK - 1)
        ks = np.arange(k0, k1, dtype=np.float64)
        block = np.empty(k1 - k0 + 1)
        block[0] = start
        np.cumprod((n - ks) / n, out=block[1:])
        block[1:] *= start
        if epsilon > 0 and block[-1] < epsilon * (running + block.sum()):
            cumulative = running + np.cumsum(block)
            prior = np.concatenate(([running], cumulative[:-1]))
            stop = np.flatnonzero(block < epsilon * prior)
            if stop.size:
                j = int(stop[0])
                if j > 0:
                    yield k0, block[:j]
                return
        yield k0, block
        running += float(block.sum())
        if k1 == n:
            return
        start = float(block[-1]) * (n - k1) / n
        k0 = k1 + 1


def _accumulate_survival(n: int, epsilon: float) -> tuple[float, int, float]:
    """Return ``(sum of kept P_k, truncation index K, P_{K+1})``."""
    total = 0.0
    last_k, last_p = 1, 1.0
    for k0, block in _survival_blocks(n, epsilon):
        total += float(block.sum())
        last_k, last_p = k0 + len(block) - 1, float(block[-1])
    tail = last_p * (n - last_k) / n
    return total, last_k, tail


def truncation_index(n: int, epsilon: float = DEFAULT_EPSILON) -> int:
    """Index ``K(n)`` beyond which survival terms vanish at precision ``epsilon``."""
    n = FaceCount(n)
    return _accumulate_survival(n, _check_epsilon(epsilon))[1]


def pmf_recursive(n: int, epsilon: float = DEFAULT_EPSILON) -> PmfTable:
    """Tabulate the pmf by the ratio recursion ``p_k = p_{k-1} * phi_k``.

    ``phi_k = k * (n - k + 1) / (n * (k - 1))``, algebraically the same as
    ``k * (1/(k-1) - 1/n)`` but free of cancellation near ``k = n``.  The
    table stops at the truncation index of ``truncation_index``;
    ``epsilon = 0`` requests all ``n`` entries.
    """
    n = FaceCount(n)
    epsilon = _check_epsilon(epsilon)
    if epsilon == 0.0 and n > MAX_FULL_TABLE:
        raise FullTableTooLarge(f"full table for n={n} exceeds {MAX_FULL_TABLE} entries")
    _, K, tail = _accumulate_survival(n, epsilon)
    if K == n:
        tail = 0.0

    probs = np.empty(K)
    logs = np.empty(K)
    probs[0] = 1.0 / n
    logs[0] = -math.log(n)
    k0 = 2
    while k0 <= K:
        k1 = min(K, k0 + _BLOCK - 1)
        k = np.arange(k0, k1 + 1, dtype=np.int64)
        kf = k.astype(np.float64)
        phi = kf * (n - kf + 1) / (n * (kf - 1))
        # phi - 1 = (n - k(k-1)) / (n(k-1)); numerator exact in int64.
        log_phi = np.log1p((n - k * (k - 1)).astype(np.float64) / (n * (kf - 1)))
        np.cumprod(phi, out=probs[k0 - 1 : k1])
        probs[k0 - 1 : k1] *= probs[k0 - 2]
        np.cumsum(log_phi, out=logs[k0 - 1 : k1])
        logs[k0 - 1 : k1] += logs[k0 - 2]
        k0 = k1 + 1
    probs.flags.writeable = False
    logs.flags.writeable = False
    return PmfTable(
        n=int(n),
        probs=probs,
        log_probs=logs,
        truncation_K=K,
        truncated=K < n,
        epsilon=epsilon,
        tail_mass=tail,
    )


def pmf_explicit(k: int, n: int) -> Probability:
    """``P(G_n = k)`` from the closed form, evaluated in log space."""
    n = FaceCount(n)
    k = _check_support(k, n)
    return Probability.from_log(math.log(k) + _log_survival(k, n) - math.log(n))


def pmf_ratio(k: int, n: int) -> Fraction:
    """Exact ratio ``phi_k = p_k / p_{k-1}`` for ``2 <= k <= n``."""
    n = FaceCount(n)
    k = _check_support(k, n)
    if k == 1:
        raise OutOfSupport("ratio is defined for k >= 2")
    return Fraction(n * k - (k - 1) * k, n * k - n)


def _exact_numerators(n: int) -> list[int]:
    # p_k * n**n = k * (n-1)!/(n-k)! * n**(n-k), all integers
    if n > MAX_EXACT:
        raise TooLargeForExact(f"exact evaluation limited to n <= {MAX_EXACT}, got {n}")
    out = []
    falling = 1
    for k in range(1, n + 1):
        out.append(k * falling * n ** (n - k))
        falling *= n - k
    return out


def pmf_exact(n: int) -> list[Fraction]:
    n = FaceCount(n)
    total = n**n
    return [Fraction(a, total) for a in _exact_numerators(n)]


def cdf(x: float, n: int) -> Probability:
    """``P(G_n <= x)``, a right-continuous step function of real ``x``."""
    n = FaceCount(n)
    x = float(x)
    if math.isnan(x):
        raise ValueError("cdf undefined at NaN")
    if x < 1:
        return Probability.zero()
    if x >= n:
        return Probability.one()
    chi = math.floor(x)
    return Probability.complement_of_log(_log_survival(chi + 1, n))


def survival_sum(k: int, n: int) -> Probability:
    """``P_k = P(G_n >= k) = (n-1)! / (n**(k-1) * (n-k)!)``."""
    n = FaceCount(n)
    k = _check_support(k, n)
    return Probability.from_log(_log_survival(k, n))


def modes(n: int) -> ModeResult:
    """Mode(s) of the pmf; two adjacent modes exactly when ``n = (m-1) m``."""
    n = FaceCount(n)
    # phi_k >= 1  <=>  k (k - 1) <= n, so m is the largest such k.
    m = (1 + math.isqrt(4 * n + 1)) // 2
    while m * (m - 1) > n:
        m -= 1
    while (m + 1) * m <= n:
        m += 1
    if n >= 2 and m * (m - 1) == n:
        return ModeResult((m - 1, m), True)
    return ModeResult((m,), False)


def mean(n: int, epsilon: float = DEFAULT_EPSILON) -> float:
    """Expected gain ``g(n) = sum_k P_k``.

    Summing survival terms is the same as ``sum_k k p_k`` and equals
    ``e**n n**-n Gamma(n+1, n) - 1``; the survival form never leaves
    ``[0, 1]`` per term, so it holds up to ``n = 10**15``.
    """
    n = FaceCount(n)
    return _accumulate_survival(n, _check_epsilon(epsilon))[0]


def variance(n: int, epsilon: float = DEFAULT_EPSILON) -> float:
    """``Var(G_n) = 2n - g(n) - g(n)**2``."""
    n = FaceCount(n)
    g = mean(n, epsilon)
    return max(2.0 * n - g - g * g, 0.0)


def mean_exact(n: int) -> Fraction:
    n = FaceCount(n)
    nums = _exact_numerators(n)
    return Fraction(sum(k * a for k, a in enumerate(nums, start=1)), n**n)


def variance_exact(n: int) -> Fraction:
    """Direct ``E[G^2] - E[G]^2`` over the exact pmf."""
    n = FaceCount(n)
    nums = _exact_numerators(n)
    first = Fraction(sum(k * a for k, a in enumerate(nums, start=1)), n**n)
    second = Fraction(sum(k * k * a for k, a in enumerate(nums, start=1)), n**n)
    return second - first * first


def moments(n: int, exact: bool = False) -> MomentReport:
    n = FaceCount(n)
    if exact:
        g = float(mean_exact(n))
        var = float(variance_exact(n))
        method = "exact-rational"
    else:
        g = mean(n)
        var = max(2.0 * n - g - g * g, 0.0)
        method = "survival-sum"
    return MomentReport(
        n=int(n),
        mean=g,
        variance=var,
        scaled_mean=g / math.sqrt(n),
        scaled_variance=var / n,
        method=method,
    )
