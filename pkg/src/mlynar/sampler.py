"""Monte Carlo play of the hyper-die game and inverse-cdf sampling.

Batches are split into fixed chunks of ``CHUNK`` draws.  Chunk ``i`` uses
the generator seeded by ``numpy.random.SeedSequence(seed).spawn(...)[i]``,
so a batch depends only on ``(n, count, seed, method)`` and never on
the number of worker threads.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .distribution import FaceCount, _log_factors

__all__ = [
    "CHUNK",
    "GameTrace",
    "RandomSource",
    "SampleStats",
    "play_game",
    "run_batch",
    "sample_inverse",
]

CHUNK = 1 << 16
METHODS = ("game", "inverse")


class RandomSource:
    """Seeded PCG64 stream of fair hyper-die throws.

    ``numpy.random.Generator.integers`` draws bounded integers by
    rejection, so there is no modulo bias even for ``n`` near ``2**63``.
    """

    def __init__(self, seed: int | np.random.SeedSequence = 0):
        if isinstance(seed, np.random.SeedSequence):
            self.seed = seed.entropy
            self._gen = np.random.Generator(np.random.PCG64(seed))
        else:
            self.seed = int(seed) & 0xFFFF_FFFF_FFFF_FFFF
            self._gen = np.random.Generator(np.random.PCG64(self.seed))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def throw(self, n: int) -> int:
        return int(self._gen.integers(1, n, endpoint=True))

    def uniform(self) -> float:
        return float(self._gen.random())


@dataclass(frozen=True)
class GameTrace:
    """One play: throws ``X_1 .. X_tau`` and the resulting gain.

    A game that reaches ``k = n`` ends without an ``n``-th throw, so then
    ``throws`` has ``n - 1`` entries and ``tau = gain = n``.
    """

    n: int
    throws: tuple[int, ...]
    tau: int
    gain: int


@dataclass
class SampleStats:
    count: int
    mean: float
    variance: float
    histogram: dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_histogram(cls, histogram: dict[int, int]) -> "SampleStats":
        # Integer moment sums keep the result independent of chunk order.
        count = sum(histogram.values())
        s1 = sum(g * c for g, c in histogram.items())
        s2 = sum(g * g * c for g, c in histogram.items())
        mean = Fraction(s1, count)
        var = Fraction(s2 * count - s1 * s1, count * (count - 1)) if count > 1 else Fraction(0)
        return cls(count, float(mean), float(var), dict(sorted(histogram.items())))


def play_game(n: int, rng: RandomSource) -> GameTrace:
    """Throw until ``X_k <= k``; gain ``n`` is forced once ``k`` reaches ``n``."""
    n = FaceCount(n)
    throws = []
    for k in range(1, n):
        x = rng.throw(n)
        throws.append(x)
        if x <= k:
            return GameTrace(int(n), tuple(throws), k, k)
    return GameTrace(int(n), tuple(throws), int(n), int(n))


def sample_inverse(n: int, u: float) -> int:
    """Smallest ``k`` with ``cdf(k, n) > u``, walking the survival recursion."""
    n = FaceCount(n)
    u = float(u)
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u}")
    target = 1.0 - u
    survival = 1.0  # P(G_n >= k)
    for k in range(1, n):
        survival *= (n - k) / n  # now P(G_n >= k + 1) = 1 - cdf(k)
        if survival < target:
            return k
    return int(n)


def _game_chunk(n: int, size: int, gen: np.random.Generator) -> np.ndarray:
    gains = np.full(size, n, dtype=np.int64)
    active = np.arange(size)
    k = 1
    while active.size and k < n:
        x = gen.integers(1, n, size=active.size, endpoint=True)
        stop = x <= k
        gains[active[stop]] = k
        active = active[~stop]
        k += 1
    return gains


def _survival_table(n: int) -> np.ndarray:
    """``-P(G_n >= k + 1)`` for ``k = 1..K``, ascending; covers every double ``u < 1``."""
    # exp(-K^2 / 2n) < 2**-54 once K^2 > 2n * 38
    last = min(n, math.ceil(math.sqrt(2 * n * 38.0)) + 1)
    k = np.arange(1, last + 1, dtype=np.float64)
    return -np.exp(np.cumsum(_log_factors(k, n)))


def _inverse_chunk(n: int, size: int, gen: np.random.Generator, table: np.ndarray) -> np.ndarray:
    u = gen.random(size)
    idx = np.searchsorted(table, u - 1.0, side="right")
    gains = idx.astype(np.int64) + 1
    overflow = idx >= table.size
    for i in np.flatnonzero(overflow):
        gains[i] = sample_inverse(n, float(u[i]))
    return gains


def run_batch(
    n: int,
    count: int,
    seed: int,
    method: str = "game",
    workers: int = 1,
) -> SampleStats:
    """Draw ``count`` gains by simulation (``game``) or cdf inversion (``inverse``)."""
    n = FaceCount(n)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    sizes = [CHUNK] * (count // CHUNK)
    if count % CHUNK:
        sizes.append(count % CHUNK)
    seeds = np.random.SeedSequence(int(seed) & 0xFFFF_FFFF_FFFF_FFFF).spawn(len(sizes))
    table = _survival_table(n) if method == "inverse" else None

    def work(i: int) -> Counter:
        gen = np.random.Generator(np.random.PCG64(seeds[i]))
        if table is None:
            gains = _game_chunk(n, sizes[i], gen)
        else:
            gains = _inverse_chunk(n, sizes[i], gen, table)
        values, counts = np.unique(gains, return_counts=True)
        return Counter(dict(zip(values.tolist(), counts.tolist())))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    else:
        parts = [work(i) for i in range(len(sizes))]
    histogram: Counter = Counter()
    for part in parts:
        histogram.update(part)
    return SampleStats.from_histogram(dict(histogram))
