"""Portable counter-based random streams.

A stream is identified by a 64-bit seed.  Its k-th raw output (k = 0, 1, ...)
is the SplitMix64 output

    x_k = mix64(seed + (k + 1) * GOLDEN  mod 2**64)

with the Stafford "mix13" finalizer::

    z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27; z *= 0x94D049BB133111EB
    z ^= z >> 31

This is exactly the sequence a sequential SplitMix64 generator produces, but
any position can be evaluated directly, so many trials can be generated at
once with numpy while each trial keeps its own independent stream.  All
state arithmetic is on unsigned 64-bit integers.

Conversions:
  * uniform on (0, 1):   ((x >> 12) + 0.5) * 2**-52
  * uniform on [0, 1):   (x >> 11) * 2**-53
  * standard normal:     inverse normal CDF of the open-interval uniform

Per-trial seeds are ``master ^ mix64(trial)``.
"""
from __future__ import annotations

import numpy as np
from scipy.special import ndtri

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_G = np.uint64(GOLDEN)
_S30, _S27, _S31, _S11, _S12 = (np.uint64(k) for k in (30, 27, 31, 11, 12))
_TWO52 = 2.0**-52
_TWO53 = 2.0**-53


def mix64_int(z: int) -> int:
    """Scalar finalizer on Python ints (reference path)."""
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def mix64(z):
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def derive_seed(master: int, key: int) -> int:
    """Child seed ``master ^ mix64(key)`` for trial or cell ``key``."""
    return (int(master) & MASK) ^ mix64_int(int(key))


def derive_seeds(master: int, keys) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.uint64)
    return np.uint64(int(master) & MASK) ^ mix64(keys)


def raw(seeds, positions) -> np.ndarray:
    """Raw outputs at ``positions`` of the streams ``seeds`` (broadcasting)."""
    seeds = np.asarray(seeds, dtype=np.uint64)
    positions = np.asarray(positions, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64(seeds + (positions + np.uint64(1)) * _G)


def to_open_uniform(x):
    return ((x >> _S12).astype(np.float64) + 0.5) * _TWO52


def to_uniform(x):
    return (x >> _S11).astype(np.float64) * _TWO53


def to_normal(x):
    return ndtri(to_open_uniform(x))


class Stream:
    """Sequential view of one counter-based stream."""

    def __init__(self, seed: int, position: int = 0):
        self.seed = int(seed) & MASK
        self.position = int(position)

    def _take(self, k):
        out = raw(np.uint64(self.seed), np.arange(self.position, self.position + k, dtype=np.uint64))
        self.position += k
        return out

    def next_raw(self, k: int) -> np.ndarray:
        return self._take(k)

    def uniform(self, k: int) -> np.ndarray:
        return to_uniform(self._take(k))

    def open_uniform(self, k: int) -> np.ndarray:
        return to_open_uniform(self._take(k))

    def normal(self, k: int) -> np.ndarray:
        return to_normal(self._take(k))
