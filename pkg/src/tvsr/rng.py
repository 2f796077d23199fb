"""Deterministic 64-bit PRNG used for weight init and dataset shuffling.

This is the SplitMix64 generator (Steele, Lea & Flood, 2014), chosen because
its whole state transition is three lines of integer arithmetic and therefore
trivially reproducible from the constants below in any language:

    state    <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z        <- state
    z        <- ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z        <- ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output   <- z XOR (z >> 31)

Derived streams:
  * uniform doubles: (output >> 11) * 2^-53, in [0, 1)
  * gaussians: Box-Muller on (u1, u2) with u1 = ((output >> 11) + 1) * 2^-53
    so that log(u1) is always finite; the second value of each pair is cached
    and returned on the next call
  * shuffle: Fisher-Yates from the top index down, j = next() mod (i + 1)

Training and initialization are bit-reproducible across runs given the seed.
"""

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TO_DOUBLE = 2.0 ** -53


class SplitMix64:
    """Deterministic generator; the full contract lives in the module docstring."""

    def __init__(self, seed: int):
        self._state = seed & _MASK
        self._spare_gaussian = None

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_uint64() >> 11) * _TO_DOUBLE

    def next_gaussian(self) -> float:
        """Standard normal via Box-Muller, pair-cached."""
        if self._spare_gaussian is not None:
            value, self._spare_gaussian = self._spare_gaussian, None
            return value
        u1 = ((self.next_uint64() >> 11) + 1) * _TO_DOUBLE  # in (0, 1]
        u2 = (self.next_uint64() >> 11) * _TO_DOUBLE
        radius = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare_gaussian = radius * math.sin(theta)
        return radius * math.cos(theta)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle, top index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_uint64() % (i + 1)
            items[i], items[j] = items[j], items[i]
