"""Retained-dyad extraction and the four-term regression fit.

The regression is the peer-influence equation: for every ordered pair
(ego i, alter j) that is a tie at both waves,

    y_i_t1 = b0 + b1 * y_i_t0 + b2 * y_j_t0 + b3 * y_j_t1 + error

Point estimates are GEE with independent working correlation and
identity link, i.e. ordinary least squares; inference uses a
cluster-robust sandwich covariance, clustered on the ego by default.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Z_95 = 1.96
MIN_ROWS = 5
MIN_CLUSTERS = 2
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class DyadRecord:
    """One regression row: an ordered ego-alter pair retained at both waves."""

    ego: int
    alter: int
    y_i_t0: float
    y_i_t1: float
    y_j_t0: float
    y_j_t1: float


@dataclass(frozen=True)
class FitResult:
    beta: np.ndarray              # (b0, b1, b2, b3)
    robust_cov: np.ndarray        # 4x4 cluster-robust sandwich
    ci95_beta3: tuple[float, float]
    n_dyads: int
    n_clusters: int

    @property
    def se_beta3(self) -> float:
        return float(np.sqrt(self.robust_cov[3, 3]))


def extract_dyads(net_t0, net_t1, y_t0, y_t1) -> list[DyadRecord]:
    """One record per ordered pair tied at both waves, in row-major order.

    A mutual friendship yields two records, one per direction.
    """
    egos, alters = dyad_indices(net_t0, net_t1)
    y_t0 = np.asarray(y_t0, dtype=float)
    y_t1 = np.asarray(y_t1, dtype=float)
    return [
        DyadRecord(
            ego=int(i),
            alter=int(j),
            y_i_t0=float(y_t0[i]),
            y_i_t1=float(y_t1[i]),
            y_j_t0=float(y_t0[j]),
            y_j_t1=float(y_t1[j]),
        )
        for i, j in zip(egos, alters)
    ]


def dyad_indices(net_t0, net_t1) -> tuple[np.ndarray, np.ndarray]:
    """(ego, alter) index arrays of pairs tied at both waves, row-major."""
    net_t0 = np.asarray(net_t0, dtype=bool)
    net_t1 = np.asarray(net_t1, dtype=bool)
    if net_t0.shape != net_t1.shape:
        raise ValueError("networks must have the same shape")
    return np.nonzero(net_t0 & net_t1)


def fit_gee(dyads: list[DyadRecord], cluster: str = "ego") -> FitResult:
    """Fit the four-term equation on retained dyads.

    cluster selects the sandwich grouping: "ego" (default) or "dyad"
    (unordered pair, so a mutual friendship's two rows share a cluster).
    """
    if len(dyads) == 0:
        raise ValueError("degenerate replication: no retained dyads")
    egos = np.array([d.ego for d in dyads])
    alters = np.array([d.alter for d in dyads])
    X = np.column_stack(
        [
            np.ones(len(dyads)),
            [d.y_i_t0 for d in dyads],
            [d.y_j_t0 for d in dyads],
            [d.y_j_t1 for d in dyads],
        ]
    )
    resp = np.array([d.y_i_t1 for d in dyads])
    return fit_arrays(egos, alters, X, resp, cluster=cluster)


def fit_arrays(
    egos: np.ndarray,
    alters: np.ndarray,
    X: np.ndarray,
    resp: np.ndarray,
    cluster: str = "ego",
) -> FitResult:
    """Array-level fit; extract_dyads/fit_gee are the record-level wrappers."""
    n_rows = X.shape[0]
    keys = _cluster_keys(egos, alters, cluster)
    codes = np.unique(keys)
    n_clusters = len(codes)
    if n_rows < MIN_ROWS or n_clusters < MIN_CLUSTERS:
        raise ValueError(
            f"degenerate replication: {n_rows} rows, {n_clusters} clusters"
        )

    # Orthogonal (SVD) solve for stability with near-collinear columns.
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    if s[-1] < RANK_RTOL * s[0]:
        raise ValueError("collinear design")
    beta = Vt.T @ ((U.T @ resp) / s)
    residuals = resp - X @ beta

    # Sandwich: bread = (X'X)^-1, meat = sum_g (X_g' r_g)(X_g' r_g)'.
    inverse_codes = np.searchsorted(codes, keys)
    scores = np.zeros((n_clusters, X.shape[1]))
    np.add.at(scores, inverse_codes, X * residuals[:, None])
    bread = Vt.T @ (Vt / (s * s)[:, None])
    cov = bread @ (scores.T @ scores) @ bread
    cov = 0.5 * (cov + cov.T)

    se3 = float(np.sqrt(max(cov[3, 3], 0.0)))
    ci = (float(beta[3] - Z_95 * se3), float(beta[3] + Z_95 * se3))
    return FitResult(
        beta=beta,
        robust_cov=cov,
        ci95_beta3=ci,
        n_dyads=n_rows,
        n_clusters=n_clusters,
    )


def covers(fit: FitResult, true_b1: float) -> bool:
    """Whether the 95% interval for the influence coefficient brackets truth."""
    low, high = fit.ci95_beta3
    return low <= true_b1 <= high


def _cluster_keys(egos: np.ndarray, alters: np.ndarray, cluster: str) -> np.ndarray:
    if cluster == "ego":
        return np.asarray(egos)
    if cluster == "dyad":
        lo = np.minimum(egos, alters).astype(np.int64)
        hi = np.maximum(egos, alters).astype(np.int64)
        return lo * (int(hi.max()) + 1) + hi
    raise ValueError(f"unknown cluster unit: {cluster!r} (use 'ego' or 'dyad')")
