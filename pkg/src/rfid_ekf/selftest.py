"""Quick invariant checks runnable from an installed package (``rfid-ekf selftest``)."""

from __future__ import annotations

import math

import numpy as np

from .aloha import run_frame
from .analysis import pseudo_cov_bounds
from .config import ExperimentConfig
from .cusum import CusumConfig, CusumState, cusum_step
from .estimator import (
    FramePrediction,
    compute_r,
    correct,
    kalman_gain,
    lambda_max,
    measurement_jacobian,
)
from .runner import run_dynamic, run_static


def _closed_form_gain(rng):
    for _ in range(2000):
        p, phi, z = 10 ** rng.uniform(-3, 3), 10 ** rng.uniform(-3, 3), 10 ** rng.uniform(0, 7)
        c = measurement_jacobian(z)
        k = kalman_gain(p, c, compute_r(phi, p, c))
        ref = 1.0 / ((1.0 + phi) * c)
        if abs(k - ref) > 1e-12 * abs(ref):
            return False
    return True


def _covariance_contraction(rng):
    for _ in range(2000):
        p, phi, z = 10 ** rng.uniform(-3, 3), 10 ** rng.uniform(-3, 3), 10 ** rng.uniform(0, 7)
        L = max(1, round(z))
        state, _ = correct(FramePrediction(z, p, L), float(rng.uniform()), phi)
        if abs(state.p_post - p * phi / (1 + phi)) > 1e-12 * p * phi / (1 + phi) or state.z_hat_post < 1:
            return False
    return True


def _lambda_root(_):
    rho, lam = lambda_max()
    return 1 < rho < 2 and abs(2 * rho + 1 - math.exp(rho)) < 1e-9 and lam < math.exp(-2)


def _occupancy(rng):
    for _ in range(200):
        L = int(rng.integers(1, 500))
        f = run_frame(int(rng.integers(0, 1000)), L, rng)
        if not (0 <= f.idle_count <= L and f.idle_count + f.occupied_count == L):
            return False
    return True


def _cusum_signs(rng):
    st, cfg = CusumState(), CusumConfig()
    for x in rng.normal(0, 2, 5000):
        st, d = cusum_step(st, float(x), cfg)
        if st.g_plus < 0 or st.g_minus > 0 or (d and (st.g_plus, st.g_minus) != (0, 0)):
            return False
    return True


def _closed_loop(_):
    cfg = ExperimentConfig(z0=2000, init_rel_error=-0.5, k_max=30, seeds=1)
    a, _s = run_static(cfg)
    b, _s = run_static(cfg)
    if a != b:
        return False
    dyn, _s = run_dynamic(cfg.replace(mode="dynamic"))
    # identical until the first alarm changes the gain ratio
    first = next((r.k for r in dyn if r.delta), cfg.k_max + 1)
    if [r for r in a if r.k < first] != [r for r in dyn if r.k < first]:
        return False
    for r in a:
        lo, hi = pseudo_cov_bounds(cfg.p00, cfg.q, cfg.q, cfg.phi_hi, cfg.q, r.k)
        if not lo <= r.P_prior <= hi * (1 + 1e-12):
            return False
        if r.L != max(1, math.floor(r.z_hat_prior + 0.5)):
            return False
        if r.k <= cfg.j_warmup and r.phi != cfg.phi_lo:
            return False
    return True


CHECKS = {
    "closed-form Kalman gain": _closed_form_gain,
    "pseudo-covariance contraction and clamp": _covariance_contraction,
    "Lambda maximiser": _lambda_root,
    "occupancy conservation": _occupancy,
    "CUSUM sign confinement and reset": _cusum_signs,
    "closed loop determinism, degeneracy, envelope, warmup": _closed_loop,
}


def run_selftest(print_fn=print) -> bool:
    rng = np.random.default_rng(2024)
    ok = True
    for name, check in CHECKS.items():
        passed = bool(check(rng))
        ok &= passed
        print_fn(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
