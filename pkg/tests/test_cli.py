import json
import os
import subprocess
import sys

import pytest

from cdirac import cli


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_examples_list(capsys):
    code, out, _ = run(["examples", "--list"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("jump_r3")


def test_emit_then_analyze_roundtrip(tmp_path, capsys):
    path = tmp_path / "jump_r3.yaml"
    assert run(["examples", "--emit", "jump_r3", "--out", str(path)], capsys)[0] == 0
    code, out, err = run(["analyze", str(path), "--res", "5"], capsys)
    assert code == 0
    doc = json.loads(out)
    strata = {(s["r"], s["s"], s["k"]): s["count"] for s in doc["strata"]}
    assert strata == {(1, 0, 1): 100, (1, 1, 0): 25}
    assert "failed 0" in err


def test_csv_header(capsys):
    code, out, _ = run(["analyze", "--example", "cr_r3", "--res", "2", "--format", "csv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,y,z,r,s,k,rank_delta,lagr_res,inv_res,marginal"
    assert len(lines) == 9


def test_box_option(capsys):
    code, out, _ = run(["analyze", "--example", "jump_r3", "--res", "3", "--box=0,1,0.5,1,0,1"], capsys)
    assert code == 0
    assert {(s["r"], s["s"], s["k"]) for s in json.loads(out)["strata"]} == {(1, 0, 1)}


def test_bad_box_is_input_error(capsys):
    code, _, err = run(["analyze", "--example", "jump_r3", "--box=0,1,2"], capsys)
    assert code == 1
    assert "--box" in err


def test_unknown_example(capsys):
    code, _, err = run(["analyze", "--example", "nope"], capsys)
    assert code == 1
    assert "unknown example" in err


def test_malformed_expression_reports_position(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text(
        "dim: 1\ncoords: [x]\nframe:\n  - vector: [\"1\"]\n    covector: [\"2x\"]\n",
        encoding="utf-8",
    )
    code, _, err = run(["analyze", str(path)], capsys)
    assert code == 1
    assert "bad.yaml:5" in err
    assert "byte 1" in err


def test_partial_failure_exit_code(tmp_path, capsys):
    path = tmp_path / "deg.yaml"
    path.write_text(
        "dim: 1\ncoords: [x]\nbox: [[-1], [1]]\nframe:\n  - vector: [\"x\"]\n    covector: [\"0\"]\n",
        encoding="utf-8",
    )
    code, out, err = run(["analyze", str(path), "--res", "3"], capsys)
    assert code == 2
    assert "FrameDegenerate" in err
    assert json.loads(out)["summary"]["failed"] == 1


def test_classify_at_jump_point(capsys):
    code, out, _ = run(["classify", "--example", "jump_r3", "--point", "0,0,0"], capsys)
    assert code == 0
    assert "(r, s, k) = (1, 1, 0)" in out
    assert "rank Δ = 2" in out


def test_classify_wrong_point_length(capsys):
    code, _, err = run(["classify", "--example", "jump_r3", "--point", "0,0"], capsys)
    assert code == 1
    assert "--point" in err


def test_tetra_triple_json(capsys):
    code, out, _ = run(["tetra", "--triple", "1,1,0", "--dim", "3"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["dim"] == 3
    assert [(q["r"], q["s"], q["k"]) for q in doc["queried"]] == [(1, 1, 0)]
    assert [1, 1, 0] in doc["admissible"]


def test_tetra_rejects_inadmissible(capsys):
    code, _, err = run(["tetra", "--triple", "1,2,0", "--dim", "3"], capsys)
    assert code == 1
    assert "order ≤ real index" in err


def test_tetra_svg(tmp_path, capsys):
    path = tmp_path / "t.svg"
    code, _, _ = run(["tetra", "--example", "jump_r3", "--point", "0,0.5,0", "--out", "svg", "--output", str(path)], capsys)
    assert code == 0
    assert path.read_text().startswith("<svg")


def test_verify_small(capsys):
    code, out, _ = run(["verify", "--suite", "identities", "--seeds", "5", "--dims", "2,3"], capsys)
    assert code == 0
    assert "total failures: 0" in out


def test_usage_error_exits_one():
    with pytest.raises(SystemExit) as info:
        cli.main(["analyze", "--res"])
    assert info.value.code == 1


def _module(args, env=None):
    full = dict(os.environ, **(env or {}))
    return subprocess.run([sys.executable, "-m", "cdirac", *args], capture_output=True, text=True, env=full)


def test_env_tolerance_is_used_and_validated():
    ok = _module(["analyze", "--example", "cr_r3", "--res", "2"], {"CDIRAC_TOL": "1e-7"})
    assert ok.returncode == 0
    assert json.loads(ok.stdout)["grid"]["tol"] == 1e-7
    bad = _module(["analyze", "--example", "cr_r3", "--res", "2"], {"CDIRAC_TOL": "2"})
    assert bad.returncode == 1


def test_analyze_output_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["analyze", "--example", "jump_r3", "--res", "4", "--out", str(a)], capsys)
    run(["analyze", "--example", "jump_r3", "--res", "4", "--out", str(b), "--workers", "2"], capsys)
    assert a.read_bytes() == b.read_bytes()
