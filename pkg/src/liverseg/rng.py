"""Portable deterministic random numbers for phantom synthesis.

xoshiro256++ (Blackman/Vigna) seeded through SplitMix64, with Box-Muller for
Gaussians. Both algorithms are fully specified integer/float recipes, so any
conforming implementation in any language reproduces the same stream for the
same 64-bit seed.
"""

from __future__ import annotations

import math

import numpy as np

_M64 = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _M64


class SplitMix64:
    """Seed expander; also usable as a standalone generator."""

    def __init__(self, seed: int):
        self.state = seed & _M64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _M64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
        return z ^ (z >> 31)


class Xoshiro256pp:
    """xoshiro256++ 1.0. State comes from four SplitMix64 outputs."""

    def __init__(self, seed: int):
        sm = SplitMix64(seed)
        self.s = [sm.next_u64() for _ in range(4)]
        if not any(self.s):
            self.s[0] = 1  # the all-zero state is invalid

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (_rotl((s0 + s3) & _M64, 23) + s0) & _M64
        t = (s1 << 17) & _M64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def next_unit_open(self) -> float:
        """Uniform in (0, 1]: ((x >> 11) + 1) * 2^-53."""
        return ((self.next_u64() >> 11) + 1) * 2.0**-53

    def next_unit(self) -> float:
        """Uniform in [0, 1): (x >> 11) * 2^-53."""
        return (self.next_u64() >> 11) * 2.0**-53

    def gaussians(self, n: int) -> np.ndarray:
        """n standard normals via Box-Muller; pairs drawn as needed, a spare
        from an odd count is discarded."""
        out = np.empty(n, dtype=np.float64)
        i = 0
        while i < n:
            u1 = self.next_unit_open()
            u2 = self.next_unit()
            r = math.sqrt(-2.0 * math.log(u1))
            a = 2.0 * math.pi * u2
            out[i] = r * math.cos(a)
            i += 1
            if i < n:
                out[i] = r * math.sin(a)
                i += 1
        return out
