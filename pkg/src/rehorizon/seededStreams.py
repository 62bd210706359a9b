from __future__ import annotations

from enum import IntEnum

import numpy as np


class Purpose(IntEnum):
    """Independent random stream per consumer; new members go at the end."""

    INSTANCE = 0
    BREAKDOWN = 1
    NOISE = 2
    SOLVE = 3
    RANDOM_FIX = 4
    ORACLE = 5
    SHUFFLE = 6
    INIT = 7
    MONTE_CARLO = 8
    LABELS = 9


def stream(seed: int, purpose: Purpose, *path: int) -> np.random.Generator:
    """PCG64 generator keyed by (seed, purpose, *path)."""
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(purpose), *map(int, path)))
    return np.random.Generator(np.random.PCG64(sequence))


def derive_seed(seed: int, purpose: Purpose, *path: int) -> int:
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(purpose), *map(int, path)))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])
