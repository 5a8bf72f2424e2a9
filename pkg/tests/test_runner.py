import math

import numpy as np
import pytest
from pytest import approx

from rfid_ekf.aloha import ScheduleEvent
from rfid_ekf.config import ConfigError, ExperimentConfig, resolve_config
from rfid_ekf.runner import TraceRow, aggregate, run_dynamic, run_experiment, run_static, summarize


def small(**kw):
    base = dict(z0=1000, init_rel_error=-0.5, k_max=10, seeds=4, master_seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_mode_guard():
    with pytest.raises(ConfigError):
        run_static(small(mode="dynamic"))
    with pytest.raises(ConfigError):
        run_dynamic(small())


def test_first_frame_error_is_zero_when_initialised_exactly():
    trace, _ = run_static(small(init_rel_error=None, z_hat0=1000))
    assert trace[0].rel_err == 0
    assert trace[0].L == 1000


def test_determinism():
    cfg = small(mode="dynamic", k_max=40, events=(ScheduleEvent.parse("walk:5:40:1sqrtzhat"),))
    a, _ = run_dynamic(cfg, 2)
    b, _ = run_dynamic(cfg, 2)
    c, _ = run_dynamic(cfg, 3)
    assert a == b
    assert a != c


def test_trace_columns_consistent():
    trace, _ = run_static(small())
    for r in trace:
        assert r.L == max(1, math.floor(r.z_hat_prior + 0.5))
        assert r.y == r.N_idle / r.L
        assert r.duration_ms == approx(0.4 * r.L)
        assert r.P_post == approx(r.P_prior * r.phi / (1 + r.phi), rel=1e-12)
        assert r.z_hat_post >= 1
        assert r.g_plus >= 0 >= r.g_minus
        assert r.region in ("R1", "R2", "R3")
        if r.k <= 3:
            assert r.phi == 0.25 and r.g_plus == r.g_minus == 0 and r.delta == 0
        else:
            assert r.phi == 10.0


def test_under50_converges_within_ten_frames():
    cfg = resolve_config("static-s1-under50").replace(seeds=20)
    errs = [t[-1].rel_err for t, _ in run_experiment(cfg)]
    assert np.median(errs) < 0.05


def test_dynamic_with_empty_schedule_matches_static_until_first_alarm():
    cfg = small(k_max=30)
    for run in range(5):
        s, _ = run_static(cfg, run)
        d, _ = run_dynamic(cfg.replace(mode="dynamic"), run)
        first = next((r.k for r in s if r.delta == 1), None)
        upto = len(s) if first is None else first - 1
        assert s[:upto] == d[:upto]


def test_step_is_detected():
    cfg = resolve_config("dynamic-s1-step").replace(seeds=5)
    for trace, summary in run_experiment(cfg):
        assert trace[49].w == round(0.4 * trace[49].z_hat_prior)
        assert summary.detection_delays[0] is not None
        assert summary.detection_delays[0] <= 10


def test_walk_is_tracked():
    cfg = small(mode="dynamic", z0=10_000, k_max=200, seeds=3, events=(ScheduleEvent.parse("walk:1:200:1sqrtzhat"),))
    for trace, _ in run_experiment(cfg):
        assert np.median([r.rel_err for r in trace[100:]]) < 0.05


def _row(k, rel, delta=0, phi_norm=0.0, duration=1000.0):
    return TraceRow(
        k=k, z_true=100, z_hat_prior=100.0, z_hat_post=100.0, L=100, N_idle=37, y=0.37, v=0.0, K=0.0,
        C=0.0, R=0.0, phi=10.0, P_prior=1.0, P_post=1.0, Phi=phi_norm, g_plus=0.0, g_minus=0.0,
        delta=delta, rel_err=rel, region="R3", duration_ms=duration,
    )


def test_summarize_convergence_and_time():
    errs = [0.5, 0.2, 0.08, 0.04, 0.03, 0.06, 0.02, 0.01, 0.01, 0.01]
    trace = [_row(k, e) for k, e in enumerate(errs, 1)]
    s = summarize(trace, small())
    assert s.convergence_frame == 4
    assert s.steady_error_mean == approx(np.mean(errs[3:]))
    assert s.total_time_ms == approx(10_000)
    assert s.final_rel_err == 0.01


def test_summarize_false_alarms_and_delays():
    cfg = small(mode="dynamic", k_max=100, events=(ScheduleEvent.parse("step:50:+100"),))
    trace = [_row(k, 0.01) for k in range(1, 101)]
    trace[19] = _row(20, 0.01, delta=1, phi_norm=-2.0)
    trace[51] = _row(52, 0.01, delta=1, phi_norm=3.0)
    s = summarize(trace, cfg)
    assert s.detections == [(20, "-"), (52, "+")]
    assert s.false_alarms == 1
    assert s.detection_delays == [2]


def test_summarize_never_converged():
    s = summarize([_row(1, 0.9), _row(2, 0.5)], small())
    assert s.convergence_frame is None and not s.converged and s.steady_error_mean is None


def test_aggregate_shape():
    cfg = small(seeds=3)
    agg = aggregate(run_experiment(cfg), cfg)
    assert agg["seeds"] == 3
    assert len(agg["per_frame"]) == 10
    assert agg["per_frame"][0]["rel_err"]["median"] == approx(0.5)


def _median_convergence_frame(name):
    cfg = resolve_config(name)
    frames = [s.convergence_frame or cfg.k_max + 1 for _, s in run_experiment(cfg)]
    return float(np.median(frames))


def test_under_estimate_start_converges_in_fewer_frames_than_over_estimate():
    # unconverged runs count as k_max + 1
    under = _median_convergence_frame("static-s1-under90")
    over = _median_convergence_frame("static-s1-over90")
    assert under < over, f"median convergence frame: under={under}, over={over}"
