import json

import numpy as np
import pytest

from symten import cli
from symten.decomp import manufactured_field
from symten.tfio import TFData, read_tf, write_tf


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ck_dimension(capsys):
    code, out, _ = run(capsys, "ck", "--n", "3", "--m", "1", "--degree", "3", "--no-timestamp")
    rep = json.loads(out)
    assert code == 0
    assert rep["result"]["dimension"] == 10 and rep["result"]["bound"] == 10
    assert rep["checks"][0]["name"] == "flat_kernel_attains_bound"
    assert "generated_at" not in rep


def test_ck_constraint(capsys):
    code, out, _ = run(capsys, "ck", "--n", "3", "--m", "2", "--constraint", "line", "--no-timestamp")
    assert code == 0 and json.loads(out)["result"]["dimension"] == 10


def test_report_keys_and_timestamp(capsys):
    code, out, _ = run(capsys, "ck", "--n", "3", "--m", "0")
    rep = json.loads(out)
    assert set(rep) == {"config", "checks", "summary", "result", "generated_at", "elapsed_seconds"}
    c = rep["checks"][0]
    assert {"name", "paper_anchor", "residual", "tol", "pass"} <= set(c)


def test_deterministic_output(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(capsys, "kinetic", "--M", "1", "--degree", "1", "--lattice", "2", "--seed", "3",
                   "--no-timestamp", "--out", str(p))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_coeffs_csv(capsys):
    code, out, _ = run(capsys, "coeffs", "--n", "3", "--m", "2", "--table", "b")
    assert code == 0
    assert out.splitlines() == ["s,k,numerator,denominator", "0,0,1,35", "1,0,-1,27", "1,1,2,315",
                                "2,0,1,11", "2,1,-20,297", "2,2,8,693"]
    code, out2, _ = run(capsys, "coeffs", "--n", "3", "--m", "2", "--table", "b", "--provenance", "recurrence")
    assert out2 == out


def test_decompose_manufactured(capsys):
    code, out, _ = run(capsys, "decompose", "--mesh", "17", "--no-timestamp")
    rep = json.loads(out)
    assert code == 0 and rep["summary"]["pass"]
    assert set(rep["result"]["errors"]) == {"v", "lam", "f_tilde"}


def test_decompose_file_round_trip(capsys, tmp_path):
    f, *_ = manufactured_field(9, 2)
    src, dst = tmp_path / "f.tf", tmp_path / "ft.tf"
    write_tf(src, TFData(2, 2, f.slots()))
    code, out, _ = run(capsys, "decompose", "--input", str(src), "--out-field", str(dst), "--no-timestamp")
    assert code == 0
    ft = read_tf(dst)
    assert ft.m == 2 and ft.grid == (9, 9)
    assert np.all(np.isfinite(ft.values))


def test_config_file_and_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# ck settings\nn = 4\nm = 1\ndegree = 3\n")
    code, out, _ = run(capsys, "ck", "--config", str(cfg), "--no-timestamp")
    assert code == 0 and json.loads(out)["result"]["dimension"] == 15
    code, out, _ = run(capsys, "ck", "--config", str(cfg), "--n", "3", "--no-timestamp")
    assert json.loads(out)["result"]["dimension"] == 10


@pytest.mark.parametrize("argv", [
    ["nonsense"],
    [],
    ["ck", "--m", "x"],
    ["ck", "--constraint", "plane"],
    ["ck", "--constraint", "jet"],
    ["coeffs", "--n", "1"],
    ["decompose", "--m", "3"],
    ["kinetic", "--metric", "hyperbolic"],
    ["verify", "--suite", "nope"],
    ["verify", "--m-max", "-1"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == cli.EXIT_USAGE


def test_bad_config(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("unknown_key = 1\n")
    assert run(capsys, "ck", "--config", str(cfg))[0] == cli.EXIT_USAGE
    cfg.write_text("just words\n")
    assert run(capsys, "ck", "--config", str(cfg))[0] == cli.EXIT_USAGE


def test_io_errors(capsys, tmp_path):
    assert run(capsys, "ck", "--config", str(tmp_path / "missing.cfg"))[0] == cli.EXIT_IO
    assert run(capsys, "decompose", "--input", str(tmp_path / "missing.tf"))[0] == cli.EXIT_IO
    bad = tmp_path / "bad.tf"
    bad.write_text("not a field\n")
    assert run(capsys, "decompose", "--input", str(bad))[0] == cli.EXIT_IO


def test_check_failure_exit(capsys):
    # rounding leaves a residual near 1e-15, so a zero tolerance must fail
    code, out, _ = run(capsys, "kinetic", "--M", "1", "--degree", "2", "--lattice", "2", "--tol", "0",
                       "--metric", "conformal:x", "--no-timestamp")
    rep = json.loads(out)
    assert rep["checks"][0]["residual"] > 0
    assert code == cli.EXIT_CHECK_FAILED and not rep["summary"]["pass"]


def test_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("SYMTEN_THREADS", "zero")
    assert run(capsys, "coeffs")[0] == cli.EXIT_USAGE
    monkeypatch.setenv("SYMTEN_THREADS", "2")
    assert run(capsys, "coeffs")[0] == 0


def test_verify_small_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "norm-constant", "--no-timestamp")
    rep = json.loads(out)
    assert code == 0 and all(c["suite"] == "norm-constant" for c in rep["checks"])
