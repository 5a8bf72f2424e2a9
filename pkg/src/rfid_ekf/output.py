"""Trace and summary writers (CSV / JSON lines / JSON)."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from pathlib import Path

from .runner import RunSummary, TraceRow, aggregate

COLUMNS = (
    "k", "z_true", "z_hat_prior", "z_hat_post", "L", "N_idle", "y", "v", "K", "C", "R", "phi",
    "P_prior", "P_post", "Phi", "g_plus", "g_minus", "delta", "rel_err", "region", "duration_ms",
)


class OutputError(OSError):
    pass


def _cell(value) -> str:
    # repr round-trips floats exactly (up to 17 significant digits)
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    return str(value)


def _json_value(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def row_values(row: TraceRow) -> list:
    return [getattr(row, c) for c in COLUMNS]


def write_trace_csv(path: Path, trace: list[TraceRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in trace:
            writer.writerow([_cell(v) for v in row_values(row)])


def write_trace_jsonl(path: Path, trace: list[TraceRow]) -> None:
    with open(path, "w") as fh:
        for row in trace:
            obj = {c: _json_value(v) for c, v in zip(COLUMNS, row_values(row))}
            fh.write(json.dumps(obj) + "\n")


def summary_document(results, config) -> dict:
    return {
        "config": dict(config.to_items()),
        "columns": list(COLUMNS),
        "runs": [_summary_dict(s) for _, s in results],
        "aggregate": aggregate(results, config),
    }


def _summary_dict(s: RunSummary) -> dict:
    d = dataclasses.asdict(s)
    d["detections"] = [list(x) for x in s.detections]
    return {k: _json_value(v) for k, v in d.items()}


def emit(results, config, fmt: str = "csv", out_dir: str | Path = "out") -> list[Path]:
    """Write one trace file per seed and one summary JSON; returns the written paths."""
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"format must be csv or jsonl, got {fmt!r}")
    out_dir = Path(out_dir)
    writer = write_trace_csv if fmt == "csv" else write_trace_jsonl
    paths = []
    target = out_dir
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for trace, summary in results:
            target = out_dir / f"{config.name}_seed{summary.run_index:04d}.{fmt}"
            writer(target, trace)
            paths.append(target)
        target = out_dir / f"{config.name}_summary.json"
        with open(target, "w") as fh:
            json.dump(summary_document(results, config), fh, indent=1)
            fh.write("\n")
        paths.append(target)
    except OSError as exc:
        raise OutputError(f"cannot write {target}: {exc.strerror or exc}") from None
    return paths
