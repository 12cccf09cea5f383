"""Dyadic dissimilarity and latent-variable probit tie generation.

The same kernel drives both network stages: a directed tie (i, j) exists
when eta0 + eta1 * d_ij exceeds an independent standard normal error,
where d_ij = -|y_i - y_j| is the (negative) trait dissimilarity. Every
ordered pair gets its own error draw, so (i, j) and (j, i) are
independent; the diagonal is always tie-free.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr


def pairwise_difference(y) -> np.ndarray:
    """Negative absolute trait differences, d_ij = -|y_i - y_j|.

    Symmetric with a zero diagonal; all entries are <= 0, so similar
    dyads carry high (less negative) values.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("pairwise_difference needs a vector of at least 2 traits")
    return -np.abs(y[:, None] - y[None, :])


def tie_probability(d_ij, eta0: float, eta1: float):
    """Probability that the probit index eta0 + eta1*d_ij beats a N(0,1) error."""
    return ndtr(eta0 + eta1 * np.asarray(d_ij, dtype=float))


def probit_ties(
    d: np.ndarray,
    eta0: float,
    eta1: float,
    rng: np.random.Generator,
    *,
    center: bool = False,
    center_mask: np.ndarray | None = None,
    draw_mask: np.ndarray | None = None,
) -> np.ndarray:
    """Draw a directed tie matrix from the probit model.

    Each ordered off-diagonal pair (i, j) becomes a tie with probability
    Phi(eta0 + eta1 * d_ij), using one independent uniform per pair. The
    uniforms are always consumed as a single row-major n*n block, so the
    same stream yields the same network no matter which options are set.

    center subtracts the mean dissimilarity before applying eta1, so the
    index is eta1 * (d - mean(d)); the mean is taken over center_mask
    (default: all off-diagonal pairs). draw_mask restricts which pairs
    are evaluated -- entries outside it are False -- which is cheaper
    when only a known subset (e.g. existing ties) can matter, and yields
    exactly the masked full draw.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if d.shape != (n, n):
        raise ValueError("difference matrix must be square")
    if eta1 < 0:
        raise ValueError("eta1 must be nonnegative")

    offset = 0.0
    if center and eta1 != 0.0:
        if center_mask is None:
            offset = d.sum() / (n * (n - 1))  # diagonal is zero by construction
        else:
            offset = float(d[center_mask].mean())

    u = rng.random((n, n))

    if eta1 == 0.0:
        p_scalar = float(ndtr(eta0))
        if draw_mask is None:
            ties = u < p_scalar
        else:
            ties = np.zeros((n, n), dtype=bool)
            ties[draw_mask] = u[draw_mask] < p_scalar
    elif draw_mask is None:
        ties = u < ndtr(eta0 + eta1 * (d - offset))
    else:
        ties = np.zeros((n, n), dtype=bool)
        ties[draw_mask] = u[draw_mask] < ndtr(eta0 + eta1 * (d[draw_mask] - offset))

    np.fill_diagonal(ties, False)
    return ties
