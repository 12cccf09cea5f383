"""Deterministic random streams for reproducible parallel simulation.

Every (master_seed, cell, rep) triple maps to its own counter-based Philox
stream, so results are identical regardless of execution order or worker
count. Normal variates come from an inverse-CDF transform of the stream's
uniforms, which keeps draws bit-identical across platforms (rejection
samplers consume a position-dependent number of values).
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1
_MAX_INDEX = 1 << 32
_U53 = 1 << 53


def derive_stream(master_seed: int, cell_index: int, rep_index: int) -> np.random.Generator:
    """Return the random stream for one (cell, replication) task.

    Pure function of its arguments: the 128-bit Philox key packs the seed
    and both indices, so repeated calls yield bit-identical streams and
    distinct triples yield independent ones.
    """
    if not 0 <= cell_index < _MAX_INDEX:
        raise ValueError(f"cell_index must be in [0, 2**32), got {cell_index}")
    if not 0 <= rep_index < _MAX_INDEX:
        raise ValueError(f"rep_index must be in [0, 2**32), got {rep_index}")
    key = (master_seed & _MASK64) | (cell_index << 64) | (rep_index << 96)
    return np.random.Generator(np.random.Philox(key=key))


def open_uniforms(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform draws strictly inside (0, 1), safe for inverse-CDF transforms."""
    return (rng.integers(0, _U53, size=size) + 0.5) / _U53


def standard_normals(rng: np.random.Generator, size) -> np.ndarray:
    """Standard normal draws via the inverse normal CDF."""
    return ndtri(open_uniforms(rng, size))
