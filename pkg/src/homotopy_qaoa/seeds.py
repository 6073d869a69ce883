"""Deterministic RNG derivation.

Every random draw in the package flows through a PCG64 generator seeded from
a ``numpy.random.SeedSequence`` built out of integer/string keys, so any run
replays bit-identically from its (master seed, key...) tuple and adding a new
key never perturbs the streams of existing ones.
"""

from __future__ import annotations

import zlib

import numpy as np


def _entropy(master: int, keys) -> list[int]:
    out = [int(master)]
    for k in keys:
        if isinstance(k, str):
            out.append(zlib.crc32(k.encode("utf-8")))
        elif isinstance(k, (int, np.integer)):
            out.append(int(k))
        else:
            raise TypeError(f"seed keys must be int or str, got {type(k).__name__}")
    return out


def seed_sequence(master: int, *keys) -> np.random.SeedSequence:
    return np.random.SeedSequence(_entropy(master, keys))


def rng_for(master: int, *keys) -> np.random.Generator:
    """PCG64 generator for the stream identified by (master, keys...)."""
    return np.random.default_rng(seed_sequence(master, *keys))


def seed_int(master: int, *keys) -> int:
    """Stable integer label for the stream, for logs and CSV columns."""
    return int(seed_sequence(master, *keys).generate_state(1, np.uint64)[0])
