"""Deterministic sampling of query multisets.

Multisets of size t over [n] are ranked lexicographically through the
stars-and-bars bijection with t-combinations of [n + t - 1], so sampling
a uniform multiset is drawing a uniform rank and unranking it. The PRNG
is splitmix64: the same 64-bit seed produces the same sample sequence on
every platform.
"""

from __future__ import annotations

from math import comb
from typing import List, Tuple

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """The splitmix64 generator; deterministic and seedable with any int."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, bound: int) -> int:
        """Uniform int in [0, bound) by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound > _MASK64:
            raise ValueError("bound exceeds the 64-bit generator range")
        limit = (_MASK64 + 1) - (_MASK64 + 1) % bound
        while True:
            v = self.next_u64()
            if v < limit:
                return v % bound


def multiset_count(n: int, t: int) -> int:
    """Number of size-t multisets over [n]."""
    return comb(n + t - 1, t)


def unrank_multiset(rank: int, n: int, t: int) -> Tuple[int, ...]:
    """The rank-th (0-based) size-t multiset over [1, n] in lexicographic
    order, as a nondecreasing tuple."""
    total = multiset_count(n, t)
    if not 0 <= rank < total:
        raise ValueError(f"rank {rank} out of range [0, {total})")
    big_n = n + t - 1
    combo = []
    x = 0
    r = rank
    for pos in range(t):
        while True:
            block = comb(big_n - x - 1, t - pos - 1)
            if r < block:
                break
            r -= block
            x += 1
        combo.append(x)
        x += 1
    return tuple(j - pos + 1 for pos, j in enumerate(combo))


def rank_multiset(indices: Tuple[int, ...], n: int) -> int:
    """Inverse of unrank_multiset for a nondecreasing tuple over [1, n]."""
    t = len(indices)
    combo = [v + pos - 1 for pos, v in enumerate(indices)]
    big_n = n + t - 1
    rank = 0
    prev = -1
    for pos, j in enumerate(combo):
        for x in range(prev + 1, j):
            rank += comb(big_n - x - 1, t - pos - 1)
        prev = j
    return rank


def sample_ranks(n: int, t: int, count: int, seed: int) -> List[int]:
    """The deterministic sequence of multiset ranks for a seeded run."""
    total = multiset_count(n, t)
    prng = SplitMix64(seed)
    return [prng.randbelow(total) for _ in range(count)]
