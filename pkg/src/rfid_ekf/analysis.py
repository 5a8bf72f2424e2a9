"""Closed-form stability diagnostics evaluated along a trace.

These annotate runs; the estimator never branches on them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class StabilityParams:
    varsigma: float = 0.5
    m_const: float = 2.0
    epsilon0: float | None = None

    def __post_init__(self):
        if not 0 < self.varsigma < 1:
            raise ValueError(f"varsigma must lie in (0, 1), got {self.varsigma}")
        if not self.m_const > 1:
            raise ValueError(f"M must exceed 1, got {self.m_const}")
        if self.epsilon0 is not None and not self.epsilon0 > 0:
            raise ValueError(f"epsilon0 must be positive, got {self.epsilon0}")


class Region(str, enum.Enum):
    R1 = "R1"  # large error, exponential decrease
    R2 = "R2"
    R3 = "R3"  # error already at the noise floor


@dataclass(frozen=True)
class RegionReport:
    region: Region
    thresholds: tuple[float, float]
    error_abs: float
    error_rel: float
    beyond_envelope: bool = False


def check_phi_condition(phi: float, varsigma: float) -> bool:
    return phi >= 1.0 / (4.0 * (1.0 + varsigma))


def epsilon_k(varsigma: float, z_hat_prior: float) -> float:
    return varsigma / (1.0 + 2.0 * varsigma) * z_hat_prior


def _thresholds(z_hat_prior: float, phi: float, params: StabilityParams, scale: float):
    s, m = params.varsigma, params.m_const
    t_lo = math.sqrt(scale * z_hat_prior / (phi * (1.0 - s)))
    t_hi = math.sqrt(scale * m * z_hat_prior / (phi * (m - 1.0) * (1.0 - s)))
    return t_lo, t_hi


def _classify(e_abs, z_hat_prior, thresholds, params) -> RegionReport:
    t_lo, t_hi = thresholds
    if e_abs < t_lo:
        region = Region.R3
    elif e_abs < t_hi:
        region = Region.R2
    else:
        region = Region.R1
    return RegionReport(
        region=region,
        thresholds=thresholds,
        error_abs=e_abs,
        error_rel=e_abs / z_hat_prior,
        beyond_envelope=e_abs > epsilon_k(params.varsigma, z_hat_prior),
    )


def classify_region_static(e_abs: float, z_hat_prior: float, phi: float, params: StabilityParams) -> RegionReport:
    return _classify(abs(e_abs), z_hat_prior, _thresholds(z_hat_prior, phi, params, 1.0), params)


def classify_region_dynamic(e_abs: float, z_hat_prior: float, phi: float, params: StabilityParams) -> RegionReport:
    return _classify(abs(e_abs), z_hat_prior, _thresholds(z_hat_prior, phi, params, 4.0), params)


def dynamic_bounds(z_hat_prior: float, phi: float, params: StabilityParams) -> tuple[float, float, float]:
    """Tolerable population drift: (bound on E[w], bound on E[w^2], error floor eps_tilde)."""
    s = params.varsigma
    eps_tilde = _thresholds(z_hat_prior, phi, params, 4.0)[1]
    lam = phi * (1.0 - s) * eps_tilde / (3.0 * (1.0 + phi) * (2.0 * phi + s / (1.0 + 3.0 * s)))
    sigma = z_hat_prior / (1.0 + phi) ** 2
    return lam, sigma, eps_tilde


def pseudo_cov_bounds(
    p00: float, q0: float, q_bar: float, phi_bar: float, q_prev: float, k: int
) -> tuple[float, float]:
    """Envelope [p_lo, p_hi] for the prior pseudo-covariance at frame ``k`` >= 1."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    decay = (1.0 - 1.0 / (1.0 + phi_bar)) ** (k - 1)
    return q_prev, (p00 + q0) * decay + q_bar * phi_bar + q_prev


def relative_error(z_true: int, z_hat_prior: float) -> float:
    if z_true < 1:
        raise ValueError("relative error undefined for an empty population")
    return abs(z_true - z_hat_prior) / z_true
