"""Seed derivation shared by every randomized routine.

All randomness flows from ``make_rng(seed, *keys)``: a Philox counter-based
generator keyed by a ``SeedSequence`` over the master seed and the integer
keys (replicate index, round, ...). Results therefore depend only on the
key tuple, never on execution order.
"""
from __future__ import annotations

import numpy as np

RNG_NAME = "numpy.random.Philox(SeedSequence(seed, *keys))"

_MASK64 = (1 << 64) - 1


def _entropy(seed: int, keys: tuple[int, ...]) -> list[int]:
    return [int(seed) & _MASK64, *(int(k) & _MASK64 for k in keys)]


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(_entropy(seed, keys))))


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit child seed for replicate ``keys`` of master ``seed``."""
    hi, lo = np.random.SeedSequence(_entropy(seed, keys)).generate_state(2, np.uint32)
    return (int(hi) << 32) | int(lo)
