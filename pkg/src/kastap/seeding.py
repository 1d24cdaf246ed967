"""Seed derivation for independent, order-free random streams."""
from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode())
    return int(part)


def stream(master_seed: int, *key) -> np.random.SeedSequence:
    """SeedSequence for ``(master_seed, *key)``; strings are hashed stably."""
    return np.random.SeedSequence(int(master_seed), spawn_key=tuple(_key(k) for k in key))


def rng(master_seed: int, *key) -> np.random.Generator:
    return np.random.default_rng(stream(master_seed, *key))
