from __future__ import annotations

import io
import json
import subprocess
import sys

from conftest import DATA
from ladderlab.cli import Check, Report, emit_report, main

def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()

def run_json(*argv):
    code, out, err = run(*argv, "--format", "json")
    return code, [json.loads(line) for line in out.splitlines()], err

def test_quotient_cross_check():
    code, [rep], _ = run_json("quotient", "paper_q2", "--cross-check")
    assert code == 0 and rep["ok"]
    assert rep["results"]["class_count"] == 2

def test_classify_union():
    code, [rep], _ = run_json("classify", "paper_q2", "--union", "3", "--cross-check")
    assert code == 0
    assert rep["results"]["union_types"] == 4

def test_validate_broken_exits_2():
    code, out, err = run("validate", str(DATA / "broken.inst"))
    assert code == 2 and out == ""
    assert "ValidationError" in err and "increasing" in err

def test_validate_ok():
    code, [rep], _ = run_json("validate", "separated")
    assert code == 0 and rep["results"]["valid"] and rep["results"]["window_separated"]

def test_missing_file_exits_2():
    code, _, err = run("quotient", "no/such/file.inst")
    assert code == 2 and err.startswith("error:")

def test_bad_usage_exits_2():
    assert run("quotient")[0] == 2
    assert run("frobnicate", "x")[0] == 2

def test_json_deterministic():
    a = run("classify", "paper_q3", "--format", "json")[1]
    b = run("classify", "paper_q3", "--format", "json")[1]
    assert a == b

def test_text_table():
    code, out, _ = run("quotient", "paper_q2", "--cross-check")
    assert code == 0
    assert "class_count" in out and "check class_count = brute_class_count: pass" in out

def test_oracle_mismatch_line():
    rep = Report("quotient", results={"class_count": 3},
                 checks=[Check("class_count = brute_class_count", False, "expected 2, got 3")])
    text = emit_report(rep, "text")
    assert "ORACLE MISMATCH: class_count = brute_class_count: expected 2, got 3" in text
    assert not rep.ok
    assert json.loads(emit_report(rep, "json"))["ok"] is False

def test_iso_and_extension():
    code, [rep], _ = run_json("iso", "paper_q2", "zero", "diagonal", "--cross-check")
    assert code == 0 and rep["results"]["isomorphic"]
    code, [rep], _ = run_json("iso", "paper_q2", "zero", "split")
    assert not rep["results"]["isomorphic"]
    code, [rep], _ = run_json("iso", "paper_q2", "zero", "split", "--mu0", "3", "--mu1", "4")
    assert rep["results"]["holds"] is False

def test_code_then_decode(tmp_path):
    target = tmp_path / "{name}.json"
    code, reps, _ = run_json("code", "paper_q2", "--out", str(target))
    assert code == 0 and len(reps) == 3
    assert all(r["results"]["valid"] for r in reps)
    path = tmp_path / "split.json"
    code, [rep], _ = run_json("decode", "paper_q2", str(path), "--shuffle", "7", "--cross-check")
    assert code == 0 and rep["results"]["verified"]

def test_uniformize_prefix():
    code, [rep], _ = run_json("uniformize", "paper_q2", "--colouring", "diagonal", "--cross-check")
    assert code == 0 and rep["results"]["uniform"]
    code, [rep], _ = run_json("uniformize", "paper_q2", "--colouring", "split", "--cross-check")
    assert code == 0 and not rep["results"]["uniform"]

def test_gen_deterministic(tmp_path):
    args = ("gen", "--seed", "4", "--S", "3,5", "--horizon", "7")
    a, b = run(*args)[1], run(*args)[1]
    assert a == b
    out = tmp_path / "g.inst"
    assert run(*args, "--out", str(out))[0] == 0
    assert run("validate", str(out))[0] == 0

def test_corpus_cross_check():
    code, reps, _ = run_json("corpus", "--seed", "3", "--count", "5", "--cross-check")
    assert code == 0 and len(reps) == 5

def test_demo():
    code, reps, _ = run_json("demo")
    assert code == 0
    assert [r["results"]["class_count"] for r in reps] == [2, 3, 4]

def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "ladderlab.cli", "quotient", "paper_q2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "class_count" in proc.stdout
