import csv
import json
import subprocess
import sys
import time

import numpy as np
import pytest

from vmric.cli import main


def run(*argv):
    return main([str(a) for a in argv])


def test_theory_case1(tmp_path):
    out = tmp_path / "t.json"
    assert run("theory", "--case", 1, "--n", 1_000_000, "--out", out) == 0
    d = json.loads(out.read_text())["case1"]
    assert d["model2"]["vmric"]["total"] == pytest.approx(7.914, abs=5e-4)
    assert d["model1"]["vmric"]["total"] == pytest.approx(6.6388, abs=5e-4)
    assert d["config"]["phi1"] == 0.4


def test_fit_noiseless(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.standard_normal(200)
    data = tmp_path / "d.csv"
    with data.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "y1", "y2"])
        y = np.zeros((200, 2))
        y[2:] = np.outer(x[:-2], [2.0, -0.5])
        for row in np.column_stack([x, y]):
            wr.writerow([repr(float(v)) for v in row])
    out = tmp_path / "f.json"
    assert run("fit", "--data", data, "--out", out) == 0
    d = json.loads(out.read_text())
    assert d["b_hat"] == pytest.approx([2.0, -0.5], abs=1e-12)
    assert d["residual_norm"] < 1e-10 and d["n_train"] == 198


def test_round_trip(tmp_path):
    data, fit, cfg, sel = (tmp_path / f for f in ("d.csv", "f.json", "c.json", "s.json"))
    assert run("simulate", "--case", 1, "--n", 5000, "--seed", 3, "--out", data) == 0
    assert run("fit", "--data", data, "--predictor", "w", "--out", fit) == 0
    b = json.loads(fit.read_text())["b_hat"]
    assert b == pytest.approx([1.5 * 0.4 / 1.75, -2 * 0.4 / 1.75], abs=0.1)
    cfg.write_text(json.dumps({"horizon": 2, "candidates": [{"id": 1, "series": "w"}, {"id": 2, "series": "z"}]}))
    assert run("select", "--data", data, "--config", cfg, "--out", sel) == 0
    rep = json.loads(sel.read_text())
    assert rep["chosen"]["vmric"] == 1
    assert [m["id"] for m in rep["per_model"]] == [1, 2]


def test_invalid_config_fast_and_no_output(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"phi1": 1.2, "phi2": 0.5, "a1": 1, "a2": 1, "psi1": 0.3}))
    out = tmp_path / "o.csv"
    t0 = time.perf_counter()
    code = run("table2", "--config", bad, "--out", out)
    assert time.perf_counter() - t0 < 1.0
    assert code == 2 and not out.exists()
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("error: config-invalid:")


@pytest.mark.parametrize(
    "payload",
    [
        {"case": 1, "phi3": 0.1},
        {"table": "table4", "case": 1, "replicates": 5},
    ],
)
def test_unknown_keys_rejected(tmp_path, payload):
    f = tmp_path / "c.json"
    f.write_text(json.dumps(payload))
    cmd = "table4" if "table" in payload else "theory"
    assert run(cmd, "--config", f, "--out", tmp_path / "o") == 2


def test_unknown_candidate_keys(tmp_path):
    data = tmp_path / "d.csv"
    run("simulate", "--case", 2, "--n", 300, "--out", data)
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"candidates": [{"id": 1, "series": "w", "weight": 2}]}))
    assert run("select", "--data", data, "--config", cfg, "--out", tmp_path / "s") == 2


def test_exit_codes(tmp_path, capsys):
    assert run("table2", "--case", 7, "--out", tmp_path / "o") == 2
    assert run("fit", "--data", tmp_path / "missing.csv", "--out", tmp_path / "o") == 3
    flat = tmp_path / "flat.csv"
    flat.write_text("x,y1\n" + "0.0,1.0\n" * 20)
    assert run("fit", "--data", flat, "--out", tmp_path / "o") == 4
    lines = capsys.readouterr().err.strip().splitlines()
    assert [l.split(":")[1].strip() for l in lines] == ["config-invalid", "io-error", "numerical-failure"]


def test_seed_env_fallback(tmp_path, monkeypatch):
    a, b, c = (tmp_path / f for f in ("a.csv", "b.csv", "c.csv"))
    monkeypatch.setenv("VMRIC_SEED", "11")
    run("simulate", "--case", 3, "--n", 50, "--out", a)
    run("simulate", "--case", 3, "--n", 50, "--seed", 11, "--out", b)
    run("simulate", "--case", 3, "--n", 50, "--seed", 12, "--out", c)
    assert a.read_text() == b.read_text() != c.read_text()
    monkeypatch.setenv("VMRIC_SEED", "abc")
    assert run("simulate", "--case", 3, "--n", 50, "--out", a) == 2


def test_table4_case1_small(tmp_path):
    out, rec = tmp_path / "t4.csv", tmp_path / "r.json"
    assert run("table4", "--case", 1, "--n", 100, "--replications", 200, "--seed", 0,
               "--workers", 2, "--records", rec, "--out", out) == 0
    row = next(csv.DictReader(out.open()))
    assert abs(float(row["case1_vmric"]) - 85.9) <= 5.0
    assert len(json.loads(rec.read_text())) == 200


def test_table3_writes_csv(tmp_path):
    out = tmp_path / "t3.csv"
    assert run("table3", "--case", 2, "--sizes", "100,200", "--replications", 10, "--out", out) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["n"] for r in rows] == ["100", "200"]


def test_console_script_module():
    proc = subprocess.run([sys.executable, "-m", "vmric.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "vmric" in proc.stdout
