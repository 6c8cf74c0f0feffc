"""Per-component random streams derived from one 64-bit seed.

Every component draws only doubles via ``Generator.random`` and maps them to
integers with ``int(u * k)``; doubles are produced identically whether drawn
one at a time or in a vectorised block, which keeps the actor-based and
batched code paths on the same sequence.
"""
from __future__ import annotations

import zlib

import numpy as np

REFEREE = "referee"
ALICE = "alice"
BOB = "bob"
SOURCE_HERALD = "source/herald"
SOURCE_MEASURE = "source/measure"

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed: int, label: str) -> np.random.Generator:
    """Return the generator for ``label`` under the master ``seed``."""
    key = zlib.crc32(label.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(check_seed(seed), spawn_key=(key,)))


def derive_seed(seed: int, label: str) -> int:
    """Expand ``seed`` into an independent 64-bit seed for a sub-run."""
    key = zlib.crc32(label.encode("utf-8"))
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(key,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def draw_index(rng: np.random.Generator, k: int) -> int:
    """Uniform integer in ``[0, k)`` from a single double."""
    return min(int(rng.random() * k), k - 1)
