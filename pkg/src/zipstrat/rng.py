"""Seeded, splittable randomness: one root seed, independent streams per key path."""

from __future__ import annotations

import numpy as np


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Philox generator for the stream ``keys`` under ``seed``.

    Streams depend only on (seed, keys), so samples can be produced in any
    order or in parallel without changing results.
    """
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))
