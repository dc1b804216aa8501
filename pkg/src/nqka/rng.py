"""Seedable random sources.

Every probabilistic routine takes an explicit ``numpy.random.Generator``.
Trial ``i`` of a run seeded with ``s`` always gets the same independent
stream, no matter how trials are scheduled across workers.
"""
from __future__ import annotations

import numpy as np

RandomSource = np.random.Generator


def make_rng(seed: int | None = None) -> RandomSource:
    return np.random.default_rng(seed)


def trial_rng(seed: int, index: int) -> RandomSource:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def split(rng: RandomSource, count: int) -> list[RandomSource]:
    return list(rng.spawn(count))
