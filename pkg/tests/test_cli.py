import csv
import json

import pytest

from momentmoduli.cli import main
from momentmoduli.constructions import make_fn
from momentmoduli.spaces import INF


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants_csv(capsys, tmp_path):
    path = tmp_path / "grid.csv"
    code, _, _ = run_cli(["constants", "--pmin", "1", "--pmax", "4",
                          "--step", "0.5", "--out", str(path)], capsys)
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert rows[0].keys() == {"p", "q", "c", "C", "C_opt", "theta_max",
                              "snowflake", "Q_star", "bm_bound",
                              "general_bound"}
    assert len(rows) == 7 * 15  # 7 p values x 15 q values
    # 17-significant-digit round trip
    for row in rows[:10]:
        assert float(row["c"]) == float(row["c"])


def test_verify_fn_ok(capsys):
    code, out, _ = run_cli(["verify", "fn", "--n", "5", "--q", "inf",
                            "--p", "1"], capsys)
    assert code == 0
    assert "predicted" in out and "2.6" in out and "OK" in out


def test_verify_missing_flag_exits_2(capsys):
    code, _, err = run_cli(["verify", "fn", "--p", "1"], capsys)
    assert code == 2
    assert "fn needs" in err


def test_verify_unknown_construction_exits_2(capsys):
    code, _, err = run_cli(["verify", "wat", "--p", "1"], capsys)
    assert code == 2


def test_ratio_roundtrip(capsys, tmp_path):
    cfg = make_fn(2, INF, 2.0).config
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg.to_json()))
    csv_path = tmp_path / "reports.csv"
    code, out, _ = run_cli(["ratio", "--config", str(path),
                            "--csv", str(csv_path)], capsys)
    assert code == 0
    payload = json.loads(out)
    names = [r["name"] for r in payload]
    assert "Barycenter" in names and "Roundness" in names
    rows = list(csv.DictReader(csv_path.open()))
    assert rows[0].keys() == {"name", "p", "q", "space", "value", "bound",
                              "slack"}


def test_ratio_malformed_json_exits_2(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"space": {"kind": "real_line"}, "X": {"atoms": [0]}}')
    code, _, err = run_cli(["ratio", "--config", str(path)], capsys)
    assert code == 2
    assert "'Y'" in err  # names the offending field


def test_check_cosine(capsys, tmp_path):
    out_path = tmp_path / "violations.csv"
    code, _, err = run_cli(["check", "cosine", "--grid", "5",
                            "--out", str(out_path)], capsys)
    assert code == 0
    assert "0 violation(s)" in err
    header = out_path.read_text().strip().splitlines()
    assert len(header) == 1  # only the header row: no violations


def test_check_beta(capsys, tmp_path):
    code, _, err = run_cli(["check", "beta", "--grid", "50",
                            "--out", str(tmp_path / "b.csv")], capsys)
    assert code == 0


def test_search_deterministic_output(capsys, tmp_path):
    args = ["search", "--space", "realline", "--objective", "roundness",
            "--p", "1", "--budget", "300", "--restarts", "1",
            "--seed", "42"]
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    assert run_cli(args + ["--out", str(p1)], capsys)[0] == 0
    assert run_cli(args + ["--out", str(p2)], capsys)[0] == 0
    assert p1.read_text() == p2.read_text()
    payload = json.loads(p1.read_text())
    assert payload["best_ratio"] <= 2.0 + 1e-9


def test_search_input_error(capsys):
    code, _, err = run_cli(["search", "--space", "lq", "--objective",
                            "roundness", "--p", "1", "--seed", "1"], capsys)
    assert code == 2
    assert "--q" in err


def test_sweep_csv_and_exit_code(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, _, _ = run_cli(["sweep", "--construction", "bipartite",
                          "--n", "1,2,4", "--p", "1,2",
                          "--out", str(out_path)], capsys)
    assert code == 0
    rows = list(csv.DictReader(out_path.open()))
    assert len(rows) == 6
    assert all(r["status"] == "ok" for r in rows)
    # predicted/computed agree row-wise
    for r in rows:
        assert float(r["computed"]) == pytest.approx(
            float(r["predicted"]), abs=1e-9)


def test_check_commands_smoke(capsys, tmp_path):
    for args in (["check", "alpha", "--grid", "30"],
                 ["check", "subadditivity", "--seeds", "30"],
                 ["check", "gaussian", "--seeds", "20"],
                 ["check", "hilbert", "--seeds", "20"],
                 ["check", "laplace", "--seeds", "2"]):
        code, _, err = run_cli(args + ["--out", str(tmp_path / "v.csv")], capsys)
        assert code == 0, (args, err)


def test_check_tolerance_breach_exits_1(capsys, tmp_path):
    # an unattainable tolerance must flip the exit code to 1
    code, _, err = run_cli(["check", "cosine", "--grid", "3",
                            "--tolerance", "1e-18",
                            "--out", str(tmp_path / "v.csv")], capsys)
    assert code == 1
    assert "violation" in err


def test_ratio_on_graph_config(capsys, tmp_path):
    from momentmoduli.constructions import make_bipartite
    cfg = make_bipartite(3, 2.0).config
    path = tmp_path / "graph.json"
    path.write_text(json.dumps(cfg.to_json()))
    code, out, _ = run_cli(["ratio", "--config", str(path)], capsys)
    assert code == 0
    names = [r["name"] for r in json.loads(out)]
    assert "MetricBarycenter" in names and "Roundness" in names
    assert "Barycenter" not in names  # nonlinear space: no vector barycenter


def test_module_invocation_subprocess(tmp_path):
    import subprocess
    import sys
    r = subprocess.run(
        [sys.executable, "-m", "momentmoduli.cli", "verify", "two-point",
         "--p", "2"],
        capture_output=True, text=True)
    assert r.returncode == 0
    assert "OK" in r.stdout
