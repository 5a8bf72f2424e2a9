"""Two-sided CUSUM on normalised innovations and the gain-ratio schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .estimator import TuningParams


@dataclass(frozen=True)
class CusumConfig:
    theta: float = 4.0
    upsilon: float = 0.5

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if not self.upsilon >= 0:
            raise ValueError(f"upsilon must be >= 0, got {self.upsilon}")


@dataclass(frozen=True)
class CusumState:
    g_plus: float = 0.0
    g_minus: float = 0.0


def default_cusum_config(sigma: float = 1.0, mu: float = 0.0) -> CusumConfig:
    """theta = 4 sigma, upsilon = mu + sigma / 2 for a N(mu, sigma^2) input."""
    return CusumConfig(theta=4.0 * sigma, upsilon=mu + 0.5 * sigma)


def normalized_innovation(
    v: float, p_prior: float, q_prev: float, jacobian: float, var_u_at_estimate: float
) -> float:
    radicand = (p_prior + q_prev) * jacobian * jacobian + var_u_at_estimate
    if not radicand > 0:
        raise ValueError(f"innovation variance must be positive, got {radicand}")
    return v / math.sqrt(radicand)


def cusum_step(state: CusumState, phi_norm: float, config: CusumConfig) -> tuple[CusumState, int]:
    g_plus = max(0.0, state.g_plus + phi_norm - config.upsilon)
    g_minus = min(0.0, state.g_minus + phi_norm + config.upsilon)
    if g_plus > config.theta or g_minus < -config.theta:
        return CusumState(), 1
    return CusumState(g_plus, g_minus), 0


def phi_select(k: int, j_warmup: int, delta: int, params: TuningParams) -> float:
    if k <= j_warmup or delta == 1:
        return params.phi_lo
    return params.phi_hi
