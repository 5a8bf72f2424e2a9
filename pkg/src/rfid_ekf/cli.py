"""Command line entry point: ``rfid-ekf run|scenarios|selftest``."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, resolve_config, shipped_scenarios
from .output import OutputError, emit
from .runner import aggregate, run_experiment


def _fmt_q(q, pct=False):
    if q is None:
        return "n/a"
    f = (lambda x: f"{100 * x:.3f}%") if pct else (lambda x: f"{x:g}")
    return f"{f(q['median'])} [{f(q['q1'])}, {f(q['q3'])}]"


def cmd_run(args) -> int:
    try:
        cfg = resolve_config(args.config)
        overrides = {}
        if args.seeds is not None:
            overrides["seeds"] = args.seeds
        if args.master_seed is not None:
            overrides["master_seed"] = args.master_seed
        if args.backend is not None:
            overrides["backend"] = args.backend
        if args.k_max is not None:
            overrides["k_max"] = args.k_max
        cfg = cfg.replace(**overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    results = run_experiment(cfg)
    try:
        paths = emit(results, cfg, args.format, args.out)
    except OutputError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 3

    agg = aggregate(results, cfg)
    print(f"{cfg.name}: mode={cfg.mode} z0={cfg.z0} z_hat0={cfg.z_hat0_resolved:g} "
          f"k_max={cfg.k_max} seeds={cfg.seeds} backend={cfg.backend}")
    print(f"  final rel. error   median [q1, q3]: {_fmt_q(agg['final_rel_err'], pct=True)}")
    print(f"  convergence frame  median [q1, q3]: {_fmt_q(agg['convergence_frame'])} "
          f"({100 * agg['converged_fraction']:.0f}% converged)")
    print(f"  steady rel. error  median [q1, q3]: {_fmt_q(agg['steady_error_mean'], pct=True)}")
    print(f"  false alarms (all seeds): {agg['false_alarms_total']}")
    for i, d in enumerate(agg["detection_delay"], 1):
        print(f"  event {i} detection delay median [q1, q3]: {_fmt_q(d)}")
    print(f"  wrote {len(paths)} files to {args.out}")
    return 0


def cmd_scenarios(args) -> int:
    for name, path in shipped_scenarios().items():
        print(f"{name:28s} {path}")
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return 0 if run_selftest() else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rfid-ekf", description="EKF tag-population estimation experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config over several seeds")
    run.add_argument("--config", required=True, help="config file path or shipped scenario name")
    run.add_argument("--seeds", type=int, help="number of seeds (overrides run.seeds)")
    run.add_argument("--master-seed", type=int, help="master seed (overrides run.master_seed)")
    run.add_argument("--k-max", type=int, help="frames per run (overrides run.k_max)")
    run.add_argument("--out", default="out", help="output directory (default: out)")
    run.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    run.add_argument("--backend", choices=("exact", "gaussian"))
    run.set_defaults(func=cmd_run)

    sc = sub.add_parser("scenarios", help="list shipped scenario configs")
    sc.set_defaults(func=cmd_scenarios)

    st = sub.add_parser("selftest", help="run the built-in invariant checks")
    st.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
