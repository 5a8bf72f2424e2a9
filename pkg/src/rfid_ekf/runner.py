"""Closed-loop estimation runs: reader-side filter against a simulated population."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .aloha import evolve_population, frame_seed, run_frame, run_frame_gaussian
from .analysis import classify_region_dynamic, classify_region_static, relative_error
from .config import ConfigError, ExperimentConfig
from .cusum import CusumState, cusum_step, normalized_innovation, phi_select
from .estimator import correct, idle_probability, initial_state, measurement_jacobian, measurement_noise_variance, predict

POP_STREAM = 1


@dataclass(frozen=True)
class TraceRow:
    k: int
    z_true: int
    z_hat_prior: float
    z_hat_post: float
    L: int
    N_idle: int
    y: float
    v: float
    K: float
    C: float
    R: float
    phi: float
    P_prior: float
    P_post: float
    Phi: float
    g_plus: float
    g_minus: float
    delta: int
    rel_err: float  # nan when z_true == 0
    region: str
    duration_ms: float
    # population change applied before this frame; not part of the emitted columns
    w: int = field(default=0, compare=False)


@dataclass
class RunSummary:
    run_index: int
    convergence_frame: int | None
    steady_error_mean: float | None
    final_rel_err: float
    detections: list[tuple[int, str]]
    false_alarms: int
    detection_delays: list[int | None]
    total_time_ms: float

    @property
    def converged(self) -> bool:
        return self.convergence_frame is not None


def _simulate(config: ExperimentConfig, run_index: int, feedback: bool) -> list[TraceRow]:
    """Shared loop. ``feedback`` lets CUSUM alarms set the gain ratio.

    Without feedback the detector still runs after warmup as a passive
    monitor, so static traces carry the same columns.
    """
    params = config.tuning()
    cus_cfg = config.cusum()
    sched = config.schedule()
    diag = config.diagnostics
    classify = classify_region_static if sched.is_static else classify_region_dynamic
    simulate_frame = run_frame if config.backend == "exact" else run_frame_gaussian

    state = initial_state(config.z_hat0_resolved, config.p00)
    cus = CusumState()
    z = sched.initial
    q_prev = params.q  # Q_0 = q
    rows = []
    for k in range(1, config.k_max + 1):
        pred = predict(state, params)
        z_prior, L = pred.z_hat_prior, pred.frame_size
        w = 0
        if sched.events:
            w, z = evolve_population(sched, k, z, z_prior, frame_seed(config.master_seed, run_index, k, POP_STREAM))

        frame = simulate_frame(z, L, frame_seed(config.master_seed, run_index, k))
        y = frame.idle_frequency
        v = y - idle_probability(z_prior, L)
        phi_norm = normalized_innovation(
            v, pred.p_prior, q_prev, measurement_jacobian(z_prior), measurement_noise_variance(z_prior, L)
        )
        delta = 0
        if k > params.j_warmup:
            cus, delta = cusum_step(cus, phi_norm, cus_cfg)
        phi = phi_select(k, params.j_warmup, delta if feedback else 0, params)

        state, rec = correct(pred, y, phi, k)
        q_prev = params.q

        rel = relative_error(z, z_prior) if z >= 1 else math.nan
        region = classify(z - z_prior, z_prior, phi, diag).region.value
        rows.append(
            TraceRow(
                k=k, z_true=z, z_hat_prior=z_prior, z_hat_post=state.z_hat_post, L=L,
                N_idle=frame.idle_count, y=y, v=rec.innovation, K=rec.kalman_gain, C=rec.jacobian,
                R=rec.r_k, phi=phi, P_prior=pred.p_prior, P_post=state.p_post, Phi=phi_norm,
                g_plus=cus.g_plus, g_minus=cus.g_minus, delta=delta, rel_err=rel, region=region,
                duration_ms=frame.duration_ms, w=w,
            )
        )
    return rows


def run_static(config: ExperimentConfig, run_index: int = 0) -> tuple[list[TraceRow], RunSummary]:
    if config.mode != "static":
        raise ConfigError(f"run_static needs mode=static, got {config.mode}")
    trace = _simulate(config, run_index, feedback=False)
    return trace, summarize(trace, config, run_index)


def run_dynamic(config: ExperimentConfig, run_index: int = 0) -> tuple[list[TraceRow], RunSummary]:
    if config.mode != "dynamic":
        raise ConfigError(f"run_dynamic needs mode=dynamic, got {config.mode}")
    trace = _simulate(config, run_index, feedback=True)
    return trace, summarize(trace, config, run_index)


def run_one(config: ExperimentConfig, run_index: int = 0):
    fn = run_static if config.mode == "static" else run_dynamic
    return fn(config, run_index)


def run_experiment(config: ExperimentConfig, progress=None) -> list[tuple[list[TraceRow], RunSummary]]:
    results = []
    for s in range(config.seeds):
        results.append(run_one(config, s))
        if progress is not None:
            progress(s)
    return results


def _event_windows(config: ExperimentConfig) -> list[tuple[int, int]]:
    return [(ev.start, ev.last + config.alarm_window) for ev in config.events]


def summarize(trace: list[TraceRow], config: ExperimentConfig, run_index: int = 0) -> RunSummary:
    if not trace:
        raise ValueError("cannot summarise an empty trace")
    thr = config.convergence_threshold
    conv = next((r.k for r in trace if r.rel_err < thr), None)
    steady = None
    if conv is not None:
        errs = [r.rel_err for r in trace if r.k >= conv and not math.isnan(r.rel_err)]
        steady = float(np.mean(errs)) if errs else None

    # g+ only rises on positive input and g- only falls on negative input,
    # so the sign of Phi says which side crossed
    detections = [(r.k, "+" if r.Phi > 0 else "-") for r in trace if r.delta == 1]
    windows = _event_windows(config)
    false_alarms = sum(1 for d, _ in detections if not any(a <= d <= b for a, b in windows))
    delays = []
    for ev in config.events:
        if ev.kind == "walk" or ev.start > trace[-1].k:
            continue
        hit = next((d for d, _ in detections if ev.start <= d <= ev.last + config.alarm_window), None)
        delays.append(None if hit is None else hit - ev.start)

    return RunSummary(
        run_index=run_index,
        convergence_frame=conv,
        steady_error_mean=steady,
        final_rel_err=trace[-1].rel_err,
        detections=detections,
        false_alarms=false_alarms,
        detection_delays=delays,
        total_time_ms=float(sum(r.duration_ms for r in trace)),
    )


def _quartiles(values) -> dict[str, float] | None:
    vals = [v for v in values if v is not None and not math.isnan(v)]
    if not vals:
        return None
    q1, med, q3 = np.percentile(vals, [25, 50, 75])
    return {"q1": float(q1), "median": float(med), "q3": float(q3)}


def aggregate(results, config: ExperimentConfig) -> dict:
    """Cross-seed statistics: medians and quartiles."""
    traces = [t for t, _ in results]
    sums = [s for _, s in results]
    per_frame = []
    for i in range(len(traces[0])):
        per_frame.append({"k": traces[0][i].k, "rel_err": _quartiles(t[i].rel_err for t in traces)})
    n_events = max((len(s.detection_delays) for s in sums), default=0)
    delays = [_quartiles(s.detection_delays[j] for s in sums) for j in range(n_events)]
    return {
        "seeds": len(sums),
        "converged_fraction": sum(s.converged for s in sums) / len(sums),
        "convergence_frame": _quartiles(s.convergence_frame for s in sums),
        "steady_error_mean": _quartiles(s.steady_error_mean for s in sums),
        "final_rel_err": _quartiles(s.final_rel_err for s in sums),
        "false_alarms_total": sum(s.false_alarms for s in sums),
        "detection_delay": delays,
        "total_time_ms": _quartiles(s.total_time_ms for s in sums),
        "per_frame": per_frame,
    }
