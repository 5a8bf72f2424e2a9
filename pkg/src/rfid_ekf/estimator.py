"""Scalar EKF for tag-population estimation from idle-slot frequencies.

The state is the tag count z. The reader observes the fraction of idle slots
in a frame of L slots, whose mean is e^(-z/L). Frame size is set to the prior
estimate, so the filter runs near load factor rho = z/L = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class TuningParams:
    q: float = 0.1
    phi_lo: float = 0.25
    phi_hi: float = 10.0
    j_warmup: int = 3

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError(f"q must be positive, got {self.q}")
        if not 0 < self.phi_lo <= self.phi_hi:
            raise ValueError(f"need 0 < phi_lo <= phi_hi, got {self.phi_lo}, {self.phi_hi}")
        if self.j_warmup < 0:
            raise ValueError(f"j_warmup must be >= 0, got {self.j_warmup}")


@dataclass(frozen=True)
class EstimatorState:
    """Posterior after the correction step of frame ``k``."""

    k: int
    z_hat_post: float
    p_post: float


@dataclass(frozen=True)
class FramePrediction:
    z_hat_prior: float
    p_prior: float
    frame_size: int


@dataclass(frozen=True)
class CorrectionRecord:
    innovation: float
    kalman_gain: float
    jacobian: float
    r_k: float
    phi_used: float


def round_half_away(x: float) -> int:
    if x >= 0:
        return int(math.floor(x + 0.5))
    return -int(math.floor(-x + 0.5))


def frame_size_for(z_hat_prior: float) -> int:
    return max(1, round_half_away(z_hat_prior))


def initial_state(z_hat0: float, p00: float) -> EstimatorState:
    if not p00 > 0:
        raise ValueError(f"P_0|0 must be positive, got {p00}")
    return EstimatorState(k=0, z_hat_post=max(1.0, float(z_hat0)), p_post=float(p00))


def predict(state: EstimatorState, params: TuningParams) -> FramePrediction:
    # static dynamics: the prior is the previous posterior
    z_prior = state.z_hat_post
    return FramePrediction(
        z_hat_prior=z_prior,
        p_prior=state.p_post + params.q,
        frame_size=frame_size_for(z_prior),
    )


def idle_probability(z: float, L: int) -> float:
    """Probability that a slot stays idle, exponential form e^(-z/L)."""
    return math.exp(-z / L)


def idle_probability_exact(z: float, L: int) -> float:
    """Exact form (1 - 1/L)^z. Only used to check the exponential form."""
    if L == 1:
        return 1.0 if z == 0 else 0.0
    return math.exp(z * math.log1p(-1.0 / L))


def load_variance(rho: float) -> float:
    """Lambda(rho) = e^-rho - (1 + rho) e^-2rho, the per-slot idle-indicator variance."""
    a = math.exp(-rho)
    return a - (1.0 + rho) * a * a


def measurement_noise_variance(z: float, L: int) -> float:
    return load_variance(z / L) / L


def measurement_jacobian(z_hat_prior: float) -> float:
    # derivative of e^(-z/L) at z = L = z_hat_prior
    return -1.0 / (math.e * z_hat_prior)


def lambda_max(tol: float = 1e-10) -> tuple[float, float]:
    """Maximiser of Lambda on (0, inf) and the maximum value.

    The stationarity condition is 2*rho + 1 - e^rho = 0, which changes sign
    exactly once on [1, 2]; plain bisection is enough.
    """
    lo, hi = 1.0, 2.0
    f = lambda r: 2.0 * r + 1.0 - math.exp(r)  # noqa: E731
    f_lo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    rho_star = 0.5 * (lo + hi)
    return rho_star, load_variance(rho_star)


def compute_r(phi: float, p_prior: float, jacobian: float) -> float:
    return phi * p_prior * jacobian * jacobian


def kalman_gain(p_prior: float, jacobian: float, r: float) -> float:
    return p_prior * jacobian / (p_prior * jacobian * jacobian + r)


def correct(
    pred: FramePrediction, y: float, phi: float, k: int | None = None
) -> tuple[EstimatorState, CorrectionRecord]:
    """Measurement update for one frame with idle frequency ``y``.

    The innovation uses the issued integer frame size. The posterior estimate
    is clamped at 1.
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"idle frequency must be in [0, 1], got {y}")
    z_prior, p_prior, L = pred.z_hat_prior, pred.p_prior, pred.frame_size
    v = y - idle_probability(z_prior, L)
    c = measurement_jacobian(z_prior)
    r = compute_r(phi, p_prior, c)
    gain = kalman_gain(p_prior, c, r)
    z_post = max(1.0, z_prior + gain * v)
    # P (1 - K C) rewritten as P R / (P C^2 + R): same value, no cancellation for small phi
    p_post = p_prior * r / (p_prior * c * c + r)
    state = EstimatorState(k=0 if k is None else k, z_hat_post=z_post, p_post=p_post)
    return state, CorrectionRecord(innovation=v, kalman_gain=gain, jacobian=c, r_k=r, phi_used=phi)
