"""Deterministic random stream derivation.

Every stochastic component draws from a generator derived here.  A run is
identified by one integer seed; independent concerns (synthesis of trial
k, null realization j of window w, fold shuffling) get their own named
substream so that adding a consumer never perturbs the draws of another.

Names are folded into the seed material by hashing, so streams are stable
across sessions and platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["substream", "generator", "derive_seed"]


def _tag_words(tag: str) -> list[int]:
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]


def substream(seed: int, tag: str) -> np.random.SeedSequence:
    """Derive the seed sequence for the named substream of ``seed``."""
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_tag_words(tag)))


def generator(seed: int, tag: str) -> np.random.Generator:
    """Generator over the named substream, independent across tags."""
    return np.random.default_rng(substream(seed, tag))


def derive_seed(seed: int, tag: str) -> int:
    """Plain integer seed derived from the named substream."""
    return int(substream(seed, tag).generate_state(1, np.uint64)[0])
