"""Seeded integer RNG used for splits, folds and per-run seed derivation.

Splits must be reproducible across implementations, so instead of relying on
any library's generator we use xorshift64* with a splitmix64 seed scrambler,
both fully specified below:

    splitmix64(x):  x += 0x9E3779B97F4A7C15
                    z = x; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
                    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
                    return z ^ (z >> 31)

    xorshift64*:    s ^= s >> 12; s ^= s << 25; s ^= s >> 27
                    output = s * 0x2545F4914F6CDD1D

All arithmetic is modulo 2**64. Permutations are Fisher-Yates driven by
unbiased rejection sampling on the 64-bit outputs. Any file that stores an
emitted split records this algorithm in its header.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One splitmix64 step; scrambles a seed into a well-mixed 64-bit word."""
    x = (x + _SPLITMIX_GAMMA) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Per-task seed for task ``index`` under ``master``; collision-free mixing."""
    return splitmix64((master & _MASK) ^ splitmix64(index & _MASK))


class XorShift64Star:
    """xorshift64* stream. State is never zero (seed is scrambled first)."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK
        self._state = splitmix64(self.seed)
        if self._state == 0:
            self._state = _SPLITMIX_GAMMA

    def next_u64(self) -> int:
        s = self._state
        s ^= s >> 12
        s = (s ^ (s << 25)) & _MASK
        s ^= s >> 27
        self._state = s
        return (s * 0x2545F4914F6CDD1D) & _MASK

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of range(n)."""
        idx = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.next_below(i + 1)
            idx[i], idx[j] = idx[j], idx[i]
        return idx


RNG_DESCRIPTION = "xorshift64star+splitmix64 fisher-yates"
