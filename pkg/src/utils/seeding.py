"""
Seed fan-out: one global seed becomes independent, reproducible per-stage seeds.

Functions:
    - derive_seed: Hash a base seed and a list of labels into a 64-bit seed.
    - make_rng: Build a numpy Generator for a derived seed.
"""

import zlib

import numpy as np


def derive_seed(base_seed: int, *labels) -> int:
    """
    Derive a stage seed from the global seed and stage labels.

    The same (base_seed, labels) always yields the same seed; changing any label
    yields an unrelated stream.

    Args:
        base_seed (int): The global seed from the run configuration.
        *labels: Stage identifiers, e.g. "ga" or ("hmm", speaker_id).

    Returns:
        int: A non-negative 64-bit seed.
    """
    words = [int(base_seed) & 0xFFFFFFFFFFFFFFFF]
    for label in labels:
        words.append(zlib.crc32(str(label).encode("utf-8")))
    state = np.random.SeedSequence(words).generate_state(1, dtype=np.uint64)
    return int(state[0])


def make_rng(base_seed: int, *labels) -> np.random.Generator:
    return np.random.default_rng(derive_seed(base_seed, *labels))
