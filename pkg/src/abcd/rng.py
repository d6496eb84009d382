"""Deterministic pseudo-randomness for sampling.

Sampling must reproduce bit-for-bit across platforms and Python versions,
so the generator is pinned here rather than borrowed from ``random``:
SplitMix64 (Steele, Lea & Flood 2014), a 64-bit counter-based generator
with a one-call-per-output finalizer. Dataset labels are folded into the
seed with FNV-1a so each stratum draws from an independent stream.
"""

from __future__ import annotations

from typing import List, Sequence

_MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


class SplitMix64:
    """64-bit SplitMix generator; state advances by the golden-ratio gamma."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), bias-free via rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        # largest multiple of bound that fits in 64 bits
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % bound


def fnv1a64(text: str) -> int:
    """FNV-1a over the UTF-8 bytes of ``text``."""
    acc = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        acc = ((acc ^ byte) * _FNV_PRIME) & _MASK64
    return acc


def stratum_seed(seed: int, label: str) -> int:
    """Per-stratum stream seed: global seed folded with the label hash."""
    return (seed ^ fnv1a64(label)) & _MASK64


def sample_indices(population: int, k: int, seed: int) -> List[int]:
    """Choose ``k`` of ``population`` indices without replacement.

    Partial Fisher-Yates over an index array; the chosen indices are
    returned in ascending order so callers can preserve original ordering.
    """
    if k < 0:
        raise ValueError("sample size must be non-negative")
    if k > population:
        raise ValueError(f"sample size {k} exceeds population {population}")
    if k == population:
        return list(range(population))
    rng = SplitMix64(seed)
    indices = list(range(population))
    for i in range(k):
        j = i + rng.below(population - i)
        indices[i], indices[j] = indices[j], indices[i]
    chosen = indices[:k]
    chosen.sort()
    return chosen
