"""Independent oracles shared across the test suite.

These deliberately avoid the code paths they check: the normal CDF comes
from mpmath, the regression solution from explicit normal equations, and
the cluster-robust covariance from a direct per-cluster loop over the
textbook formula.
"""

import mpmath
import numpy as np

from peerbias.estimator import DyadRecord


def normal_cdf(x: float) -> float:
    return float(mpmath.ncdf(x))


def ols_oracle(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Point estimates via brute-force normal equations."""
    return np.linalg.inv(X.T @ X) @ (X.T @ y)


def sandwich_oracle(X: np.ndarray, residuals: np.ndarray, keys) -> np.ndarray:
    """Cluster-robust covariance via an explicit loop over clusters."""
    bread = np.linalg.inv(X.T @ X)
    k = X.shape[1]
    meat = np.zeros((k, k))
    for key in set(keys):
        idx = [i for i, v in enumerate(keys) if v == key]
        score = X[idx].T @ residuals[idx]
        meat += np.outer(score, score)
    return bread @ meat @ bread


def random_dyad_fixture(rng: np.random.Generator, n_rows: int = 20) -> list:
    """Random dyad rows with repeated egos, guaranteed full rank."""
    n_actors = max(4, n_rows // 2)
    y_t0 = rng.normal(50, 10, n_actors)
    y_t1 = y_t0 + rng.normal(0, 5, n_actors)
    records = []
    while len(records) < n_rows:
        i, j = rng.integers(0, n_actors, 2)
        if i == j:
            continue
        records.append(
            DyadRecord(
                ego=int(i),
                alter=int(j),
                y_i_t0=float(y_t0[i]),
                y_i_t1=float(y_t1[i]),
                y_j_t0=float(y_t0[j]),
                y_j_t1=float(y_t1[j]),
            )
        )
    return records


def design_from_records(records) -> tuple:
    X = np.column_stack(
        [
            np.ones(len(records)),
            [d.y_i_t0 for d in records],
            [d.y_j_t0 for d in records],
            [d.y_j_t1 for d in records],
        ]
    )
    resp = np.array([d.y_i_t1 for d in records])
    return X, resp
