from rfid_ekf.cli import main


def test_run_scenario(tmp_path, capsys):
    rc = main(["run", "--config", "static-s1-under50", "--seeds", "2", "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "static-s1-under50" in out and "final rel. error" in out
    assert sorted(p.name for p in tmp_path.iterdir()) == [
        "static-s1-under50_seed0000.csv",
        "static-s1-under50_seed0001.csv",
        "static-s1-under50_summary.json",
    ]


def test_run_jsonl_with_overrides(tmp_path):
    rc = main([
        "run", "--config", "dynamic-s1-step", "--seeds", "1", "--k-max", "60", "--master-seed", "9",
        "--backend", "gaussian", "--format", "jsonl", "--out", str(tmp_path),
    ])
    assert rc == 0
    lines = (tmp_path / "dynamic-s1-step_seed0000.jsonl").read_text().splitlines()
    assert len(lines) == 60


def test_scenarios_lists_all(capsys):
    assert main(["scenarios"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 18


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("population.z0=100\nnonsense.key=1\n")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert main(["run", "--config", "no-such-scenario"]) == 2
    assert "config error" in capsys.readouterr().err


def test_output_error_exit_code(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    rc = main(["run", "--config", "static-s1-under50", "--seeds", "1", "--out", str(blocker / "sub")])
    assert rc == 3
    assert "output error" in capsys.readouterr().err
