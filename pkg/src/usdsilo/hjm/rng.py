"""Keyed Gaussian draws for path-parallel simulation.

The normal used for (path, step, factor) depends only on the seed and on
that triple: each path owns a fixed run of counters of a Philox4x64 stream
keyed by the seed, so any partition of paths into chunks gives identical
numbers. Uniforms map to normals by the inverse normal CDF.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Philox
from scipy.special import ndtri

# Philox4x64 emits four 64-bit words per counter increment
_WORDS_PER_COUNTER = 4
_TWO_POW_53 = 2.0**-53


def counters_per_path(steps: int, factors: int) -> int:
    return -(-(steps * factors) // _WORDS_PER_COUNTER)


def uniforms(seed: int, first_path: int, n_paths: int, steps: int, factors: int) -> np.ndarray:
    """Open-interval uniforms of shape (n_paths, steps, factors)."""
    per_path = counters_per_path(steps, factors)
    bitgen = Philox(key=seed)
    bitgen.advance(first_path * per_path)
    raw = bitgen.random_raw(n_paths * per_path * _WORDS_PER_COUNTER)
    raw = raw.reshape(n_paths, per_path * _WORDS_PER_COUNTER)[:, : steps * factors]
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_POW_53
    return u.reshape(n_paths, steps, factors)


def gaussians(seed: int, first_path: int, n_paths: int, steps: int, factors: int) -> np.ndarray:
    return ndtri(uniforms(seed, first_path, n_paths, steps, factors))
