"""Simulation parameters and validation."""

from __future__ import annotations

from dataclasses import dataclass, replace

_MAX_SEED = 1 << 64


@dataclass(frozen=True)
class SimParams:
    """Full parameterization of one simulation cell.

    Two probit stages share the trait-dissimilarity kernel: tie formation
    at t0 (eta0_form, eta1_form) and tie retention at t1 (eta0_ret,
    eta1_ret). b1 is the true influence weight; the audit runs it at 0.
    """

    n: int = 1000
    trait_mean: float = 50.0
    trait_sd: float = 10.0
    shock_sd: float = 5.0
    eta0_form: float = -2.5
    eta1_form: float = 0.0
    eta0_ret: float = 0.0
    eta1_ret: float = 0.0
    b1: float = 0.0
    replications: int = 1000
    master_seed: int = 0

    def with_(self, **kwargs) -> "SimParams":
        return replace(self, **kwargs)


def validate(params: SimParams) -> SimParams:
    """Return params unchanged if valid, else raise naming the bad field."""
    if params.n < 4:
        raise ValueError("n too small for 4-regressor fit (need n >= 4)")
    if not params.trait_sd > 0:
        raise ValueError("trait_sd must be positive")
    if params.shock_sd < 0:
        raise ValueError("shock_sd must be nonnegative")
    if params.eta1_form < 0:
        raise ValueError("eta1_form must be nonnegative")
    if params.eta1_ret < 0:
        raise ValueError("eta1_ret must be nonnegative")
    if not 0.0 <= params.b1 <= 1.0:
        raise ValueError("b1 must be in [0, 1]")
    if params.replications < 1:
        raise ValueError("replications must be at least 1")
    if not 0 <= params.master_seed < _MAX_SEED:
        raise ValueError("master_seed must be an unsigned 64-bit integer")
    return params
