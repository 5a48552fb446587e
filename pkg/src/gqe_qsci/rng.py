"""Counter-based, splittable random streams."""

from __future__ import annotations

import numpy as np


def make_rng(seed: int | None, *keys: int) -> np.random.Generator:
    """Philox stream identified by ``seed`` and a path of integer keys.

    ``make_rng(seed, it, m)`` gives the stream of circuit ``m`` at iteration
    ``it``; streams with distinct key paths are statistically independent.
    """
    seq = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(seq))


def as_generator(rng: int | np.random.Generator | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(rng)
