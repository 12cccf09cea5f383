"""Monte Carlo audit of peer-influence estimation bias under homophilous
friendship retention.

A two-wave network simulation: traits are drawn, directed ties form by a
trait-similarity probit, traits receive random shocks, ties are re-drawn
at a retention stage, and the four-term peer-influence regression is fit
on the dyads retained at both waves. Grid runs aggregate bias and
confidence-interval coverage of the influence coefficient, whose true
value is zero throughout the audit.
"""

from .dynamics import draw_shocks, update_traits
from .estimator import DyadRecord, FitResult, covers, extract_dyads, fit_gee
from .montecarlo import (
    CALIBRATED,
    CellSummary,
    Conventions,
    ReplicationStats,
    calibrate,
    diagnostics,
    run_cell,
    run_grid,
    run_replication,
    table1_grid,
)
from .netgen import pairwise_difference, probit_ties, tie_probability
from .params import SimParams, validate
from .rng import derive_stream

__version__ = "0.1.0"

__all__ = [
    "CALIBRATED",
    "CellSummary",
    "Conventions",
    "DyadRecord",
    "FitResult",
    "ReplicationStats",
    "SimParams",
    "calibrate",
    "covers",
    "derive_stream",
    "diagnostics",
    "draw_shocks",
    "extract_dyads",
    "fit_gee",
    "pairwise_difference",
    "probit_ties",
    "run_cell",
    "run_grid",
    "run_replication",
    "table1_grid",
    "tie_probability",
    "update_traits",
    "validate",
    "__version__",
]
