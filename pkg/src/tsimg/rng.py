"""Portable deterministic PRNG: xoshiro256** seeded via splitmix64.

The raw uint64 stream is integer-exact and therefore identical on every
platform and on both kernel backends. Floating-point derivations (uniforms,
Box-Muller normals) are plain IEEE double arithmetic on that stream.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels

_MASK = (1 << 64) - 1
_TO_UNIT = 2.0 ** -53


def splitmix64(x: int) -> tuple[int, int]:
    """One splitmix64 step: returns (new_state, output)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return x, z ^ (z >> 31)


class Xoshiro256StarStar:
    """Sequential xoshiro256** stream with bulk and scalar draws.

    Bulk draws go through the kernel backend; scalar draws use the same
    update in Python. Both advance the same state, so draw order alone
    determines the stream.
    """

    def __init__(self, seed: int):
        state = np.empty(4, dtype=np.uint64)
        x = int(seed) & _MASK
        for i in range(4):
            x, out = splitmix64(x)
            state[i] = out
        if not state.any():  # all-zero state is the one invalid xoshiro state
            state[0] = 1
        self._state = state

    def next_u64(self) -> int:
        s = self._state
        s0, s1, s2, s3 = int(s[0]), int(s[1]), int(s[2]), int(s[3])
        x = (s1 * 5) & _MASK
        x = ((x << 7) | (x >> 57)) & _MASK
        result = (x * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
        s[0], s[1], s[2], s[3] = s0, s1, s2, s3
        return result

    def u64_block(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.uint64)
        kernels.xoshiro_fill(self._state, out)
        return out

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * _TO_UNIT

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randint(self, n: int) -> int:
        """Uniform-ish integer in [0, n)."""
        return min(int(self.random() * n), n - 1)

    def normals(self, n: int) -> np.ndarray:
        """n standard normals via Box-Muller on a bulk uint64 block."""
        if n == 0:
            return np.empty(0)
        pairs = (n + 1) // 2
        u = self.u64_block(2 * pairs)
        u1 = ((u[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * _TO_UNIT  # (0, 1]
        u2 = (u[1::2] >> np.uint64(11)).astype(np.float64) * _TO_UNIT  # [0, 1)
        r = np.sqrt(-2.0 * np.log(u1))
        phase = 2.0 * math.pi * u2
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(phase)
        z[1::2] = r * np.sin(phase)
        return z[:n]

    def poisson(self, lam: float) -> int:
        """Knuth multiplication method; fine for the event-rate scale used here."""
        if lam <= 0:
            return 0
        limit = math.exp(-lam)
        k = 0
        p = 1.0
        while True:
            p *= self.random()
            if p <= limit:
                return k
            k += 1
