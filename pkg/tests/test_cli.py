import csv
import json
import os
import subprocess
import sys

import pytest

from greedylab.cli import main, run_experiment
from greedylab.report import Results, emit_report


def run(tmp_path, name, *args):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


def load(out):
    return json.loads((out / "summary.json").read_text())


def test_pursuit_rga(tmp_path):
    code, out = run(tmp_path, "a", "pursuit", "--algo", "rga", "--dict", "orthonormal:16",
                    "--samples", "10", "--mmax", "32", "--seed", "7")
    assert code == 0
    s = load(out)
    names = {a["invariant"] for a in s["assertions"]}
    assert {"dict_pursuit.rate", "dict_pursuit.approximant_bound",
            "recursion_lab.rga_consistency", "dict_pursuit.relaxation_inequality"} <= names
    with open(out / "detail.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["sample", "m", "atom", "sign", "weight", "residual"]
    assert s["row_count"] == len(rows) - 1


def test_byte_identical(tmp_path):
    args = ["pursuit", "--dict", "random:24x8", "--samples", "6", "--mmax", "20", "--seed", "3",
            "--plot-data"]
    _, a = run(tmp_path, "a", *args)
    _, b = run(tmp_path, "b", *args)
    for f in ("summary.json", "detail.csv", "plot.csv"):
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_threads_do_not_change_output(tmp_path, monkeypatch):
    args = ["pursuit", "--dict", "random:24x8", "--samples", "8", "--mmax", "20", "--seed", "3"]
    _, a = run(tmp_path, "a", *args)
    monkeypatch.setenv("GREEDYLAB_THREADS", "4")
    _, b = run(tmp_path, "b", *args)
    assert (a / "detail.csv").read_bytes() == (b / "detail.csv").read_bytes()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"samples": 3, "mmax": 10, "dict": "orthonormal:8"}))
    code, out = run(tmp_path, "a", "pursuit", "--config", str(cfg), "--mmax", "12")
    assert code == 0
    c = load(out)["config"]
    assert c["samples"] == 3 and c["mmax"] == 12 and c["dict"] == "orthonormal:8"


def test_exit_codes(tmp_path, capsys):
    code, _ = run(tmp_path, "a", "pursuit", "--algo", "power", "--alpha", "2", "--rate-c", "2",
                  "--rate-alpha", "1", "--dict", "orthonormal:64", "--k", "64", "--samples", "2",
                  "--mmax", "64")
    assert code == 1
    assert "dict_pursuit.rate" in capsys.readouterr().err
    assert run(tmp_path, "b", "pursuit", "--dict", "bogus:3")[0] == 2
    assert run(tmp_path, "c", "constants", "--space", "lp:0")[0] == 2
    assert run(tmp_path, "d", "recursion", "--alphas", "x,y")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run(tmp_path, "e", "pursuit", "--config", str(bad))[0] == 2
    bad.write_text(json.dumps({"nonsense": 1}))
    assert run(tmp_path, "f", "pursuit", "--config", str(bad))[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["pursuit", "--algo", "nope"])
    assert e.value.code == 2


def test_unwritable_out(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code = main(["recursion", "--alphas", "1", "--mmax", "10", "--out", str(blocker / "sub")])
    assert code == 2
    assert str(blocker) in capsys.readouterr().err


def test_recursion(tmp_path):
    code, out = run(tmp_path, "a", "recursion", "--A", "4", "--alphas", "0.5,1,1.5",
                    "--mmax", "100000", "--plot-data")
    assert code == 0
    with open(out / "detail.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["holds"] for r in rows] == ["true", "true", "false"]
    assert rows[2]["first_violation"] != ""
    with open(out / "plot.csv") as fh:
        assert next(csv.reader(fh)) == ["series", "x", "y"]


def test_constants_and_replay(tmp_path):
    code, out = run(tmp_path, "a", "constants", "--space", "lp:0.5", "--n", "6",
                    "--mode", "exhaustive", "--samples", "10")
    assert code == 0
    est = load(out)["results"]["estimates"]
    assert all(abs(e["value"] - 1) <= 1e-9 for e in est.values())
    code, _ = run(tmp_path, "b", "replay", str(out / "summary.json"))
    assert code == 0
    code, _ = run(tmp_path, "c", "constants", "--replay", str(out / "summary.json"))
    assert code == 0
    tampered = load(out)
    tampered["results"]["estimates"]["C_g"]["value"] = 1.5
    p = tmp_path / "t.json"
    p.write_text(json.dumps(tampered))
    assert run(tmp_path, "d", "replay", str(p))[0] == 1


def test_constants_xd(tmp_path):
    code, out = run(tmp_path, "a", "constants", "--space", "kt", "--n", "6", "--samples", "8",
                    "--xd")
    assert code == 0
    assert "xd" in load(out)["results"]


def test_tga_experiments(tmp_path):
    assert run(tmp_path, "a", "tga", "--experiment", "pathologies", "--n", "20", "--m", "5")[0] == 0
    assert run(tmp_path, "b", "tga", "--experiment", "oracle", "--space", "kt", "--n", "6",
               "--m", "2", "--samples", "2")[0] == 0
    assert run(tmp_path, "c", "tga", "--experiment", "oversampling", "--space", "lp:2", "--n", "8",
               "--m", "2", "--samples", "5")[0] == 0
    assert run(tmp_path, "d", "tga", "--experiment", "pathologies", "--n", "6", "--m", "4")[0] == 2


def test_assertions_name_invariants():
    res = run_experiment("recursion", {"alphas": "0.5,2", "mmax": 1000})
    assert res.assertions and all("." in a.invariant for a in res.assertions)


def test_empty_results(tmp_path):
    emit_report(Results("noop", {}), tmp_path / "e", plot_data=True)
    s = json.loads((tmp_path / "e" / "summary.json").read_text())
    assert s["row_count"] == 0 and s["passed"] is True
    assert (tmp_path / "e" / "detail.csv").read_text() == ""


def test_nonfinite_and_rounding(tmp_path):
    r = Results("x", {"a": 1 / 3}, summary={"inf": float("inf"), "nan": float("nan")},
                header=["v"], rows=[[0.1 + 0.2], [float("inf")]])
    emit_report(r, tmp_path)
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["config"]["a"] == 0.333333333333
    assert s["results"] == {"inf": "inf", "nan": "nan"}
    assert (tmp_path / "detail.csv").read_text() == "v\n0.3\ninf\n"


def test_entry_point(tmp_path):
    env = dict(os.environ)
    p = subprocess.run([sys.executable, "-m", "greedylab", "recursion", "--alphas", "1",
                        "--mmax", "100", "--out", str(tmp_path)], capture_output=True, env=env)
    assert p.returncode == 0
    assert (tmp_path / "summary.json").exists()
