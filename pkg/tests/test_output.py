import csv
import json
import math

import pytest

from rfid_ekf.config import ExperimentConfig
from rfid_ekf.output import COLUMNS, OutputError, emit
from rfid_ekf.runner import run_experiment

HEADER = (
    "k,z_true,z_hat_prior,z_hat_post,L,N_idle,y,v,K,C,R,phi,P_prior,P_post,Phi,"
    "g_plus,g_minus,delta,rel_err,region,duration_ms"
)


@pytest.fixture
def cfg():
    return ExperimentConfig(z0=500, init_rel_error=0.5, k_max=8, seeds=2, master_seed=1, name="t")


def test_csv_header_and_files(cfg, tmp_path):
    paths = emit(run_experiment(cfg), cfg, "csv", tmp_path)
    assert [p.name for p in paths] == ["t_seed0000.csv", "t_seed0001.csv", "t_summary.json"]
    lines = paths[0].read_text().splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 9


def test_csv_values_round_trip(cfg, tmp_path):
    results = run_experiment(cfg)
    paths = emit(results, cfg, "csv", tmp_path)
    with open(paths[0]) as fh:
        rows = list(csv.DictReader(fh))
    for row, tr in zip(rows, results[0][0]):
        assert float(row["z_hat_post"]) == tr.z_hat_post
        assert float(row["K"]) == tr.K
        assert int(row["L"]) == tr.L


def test_jsonl_keys(cfg, tmp_path):
    paths = emit(run_experiment(cfg), cfg, "jsonl", tmp_path)
    objs = [json.loads(line) for line in paths[1].read_text().splitlines()]
    assert len(objs) == 8
    assert all(tuple(o) == COLUMNS for o in objs)


def test_nan_written_as_null(tmp_path):
    cfg = ExperimentConfig(z0=0, z_hat0=10, k_max=3, seeds=1, name="empty")
    paths = emit(run_experiment(cfg), cfg, "jsonl", tmp_path)
    obj = json.loads(paths[0].read_text().splitlines()[0])
    assert obj["rel_err"] is None
    summary = json.loads(paths[-1].read_text())
    assert summary["runs"][0]["final_rel_err"] is None


def test_rerun_is_byte_identical(cfg, tmp_path):
    a = emit(run_experiment(cfg), cfg, "csv", tmp_path / "a")
    b = emit(run_experiment(cfg), cfg, "csv", tmp_path / "b")
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_summary_document(cfg, tmp_path):
    paths = emit(run_experiment(cfg), cfg, "csv", tmp_path)
    doc = json.loads(paths[-1].read_text())
    assert doc["columns"] == list(COLUMNS)
    assert doc["config"]["population.z0"] == "500"
    assert len(doc["runs"]) == 2
    assert not math.isnan(doc["aggregate"]["final_rel_err"]["median"])


def test_unwritable_directory(cfg, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OutputError):
        emit(run_experiment(cfg), cfg, "csv", blocker / "sub")


def test_bad_format(cfg, tmp_path):
    with pytest.raises(ValueError):
        emit([], cfg, "xml", tmp_path)
