"""Between-wave trait dynamics: random shocks and influence-weighted update."""

from __future__ import annotations

import numpy as np

from .rng import standard_normals


def draw_shocks(n: int, shock_sd: float, rng: np.random.Generator) -> np.ndarray:
    """Independent N(0, shock_sd^2) shocks, one per actor."""
    if shock_sd < 0:
        raise ValueError("shock_sd must be nonnegative")
    if shock_sd == 0.0:
        # Still consumes n draws so downstream stream positions don't shift.
        standard_normals(rng, n)
        return np.zeros(n)
    return shock_sd * standard_normals(rng, n)


def update_traits(
    y_t0: np.ndarray,
    shocks: np.ndarray,
    net_t0: np.ndarray,
    b1: float,
) -> np.ndarray:
    """Update traits to t1 with influence weight b1.

    Each ego's shocked value (y + u) is blended with the mean shocked
    value of its t0 alters: (1 - b1) * own + b1 * alter mean. Egos with
    no alters, or any ego when b1 = 0, keep their own shocked value.
    """
    y_t0 = np.asarray(y_t0, dtype=float)
    shocks = np.asarray(shocks, dtype=float)
    if y_t0.shape != shocks.shape:
        raise ValueError("y_t0 and shocks must have the same length")
    if not 0.0 <= b1 <= 1.0:
        raise ValueError("b1 must be in [0, 1]")

    shocked = y_t0 + shocks
    if b1 == 0.0:
        return shocked.copy()

    net_t0 = np.asarray(net_t0, dtype=bool)
    out_degree = net_t0.sum(axis=1)
    y_t1 = shocked.copy()
    has_alters = out_degree > 0
    alter_mean = net_t0[has_alters] @ shocked / out_degree[has_alters]
    y_t1[has_alters] = (1.0 - b1) * shocked[has_alters] + b1 * alter_mean
    return y_t1
