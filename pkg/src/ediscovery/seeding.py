"""Seed fan-out shared by protocols, CAL runs and campaigns."""
from __future__ import annotations

import numpy as np


def split_seed(root: int, *keys: int) -> int:
    """Derive an independent 32-bit seed for ``keys`` under ``root``.

    ``split_seed(root, i)`` is the seed of trial ``i``; it is the first word of
    ``SeedSequence(root, spawn_key=keys)``, i.e. what ``SeedSequence.spawn``
    would hand out, so campaigns can be parallelised without changing output.
    """
    ss = np.random.SeedSequence(int(root), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint32)[0])


def make_rng(rng=None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def uniform_rows(seeds, width: int) -> np.ndarray:
    """Row ``i`` holds the first ``width`` uniforms of ``default_rng(seeds[i])``."""
    out = np.empty((len(seeds), width))
    for i, s in enumerate(seeds):
        out[i] = np.random.default_rng(s).random(width)
    return out
