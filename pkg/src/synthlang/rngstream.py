"""Deterministic RNG substream derivation.

Every random decision in the toolkit draws from a `random.Random` seeded by a
64-bit value derived from (master_seed, stream tag, index, retry) with a
splitmix64 chain.  Sample i's stream is therefore a pure function of the
master seed and i, independent of generation order and worker count.  The
derivation is recorded verbatim in every corpus manifest.
"""

from __future__ import annotations

import random

_MASK64 = (1 << 64) - 1

# Stream tags: one per independent purpose.
STREAM_GLOBALS = 1
STREAM_LOCALS = 2
STREAM_TRAIN = 3
STREAM_EVAL = 4
STREAM_TEST_WITH_GLOBALS = 5
STREAM_TEST_NO_GLOBALS = 6
STREAM_PROBE = 7

DERIVATION_NOTE = (
    "seed = splitmix64(splitmix64(splitmix64(splitmix64(master) ^ stream) "
    "^ index) ^ retry); rng = random.Random(seed) (CPython Mersenne Twister)"
)


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master_seed: int, stream: int, index: int = 0, retry: int = 0) -> int:
    """64-bit substream seed for (master_seed, stream, index, retry)."""
    h = splitmix64(master_seed & _MASK64)
    h = splitmix64(h ^ (stream & _MASK64))
    h = splitmix64(h ^ (index & _MASK64))
    if retry:
        h = splitmix64(h ^ (retry & _MASK64))
    return h


def substream(master_seed: int, stream: int, index: int = 0, retry: int = 0) -> random.Random:
    return random.Random(derive_seed(master_seed, stream, index, retry))
