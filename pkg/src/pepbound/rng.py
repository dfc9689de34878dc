"""Deterministic pseudorandom numbers, portable across platforms.

The generator is SplitMix64 (Steele, Lea & Flood's mixer): state advances
by the 64-bit odd constant 0x9E3779B97F4A7C15, and each output is the
state passed through two xor-shift-multiply rounds.  All arithmetic is
mod 2**64.  Uniform doubles take the top 53 bits, mapped to (0, 1]; the
open lower end keeps log() in Box-Muller finite.  Normal deviates come
from the Box-Muller transform: with u1, u2 consecutive uniforms,

    r = sqrt(-2 ln u1),  z0 = r cos(2 pi u2),  z1 = r sin(2 pi u2),

and z1 is cached for the next call.  Everything here is plain integer
and float arithmetic, so a seed reproduces the same stream on any
platform -- which makes experiment outputs byte-identical across runs.
"""

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """SplitMix64 stream seeded with a 64-bit integer."""

    def __init__(self, seed: int):
        self._state = seed & _MASK
        self._spare = None  # cached second Box-Muller deviate

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in (0, 1]."""
        return ((self.next_uint64() >> 11) + 1) * 2.0 ** -53

    def normal(self) -> float:
        """Standard normal deviate via Box-Muller."""
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        t = 2.0 * math.pi * u2
        self._spare = r * math.sin(t)
        return r * math.cos(t)

    def complex_normal(self) -> complex:
        """Complex deviate: real and imaginary parts drawn in that order."""
        re = self.normal()
        im = self.normal()
        return complex(re, im)

    def complex_normal_matrix(self, rows: int, cols: int) -> np.ndarray:
        """Matrix of complex deviates, filled row-major, one entry at a time."""
        out = np.empty((rows, cols), dtype=np.complex128)
        for i in range(rows):
            for j in range(cols):
                out[i, j] = self.complex_normal()
        return out
