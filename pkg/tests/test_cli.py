import csv
import json

import numpy as np
import pytest

from qvikit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def test_solve_bundled_benchmark(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, _, _ = run(capsys, "solve", "example2.json", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["tool_version"]
    assert len(doc["runs"]) == 3
    for record in doc["runs"]:
        assert record["status"] == "converged"
        assert np.allclose(record["final_x"], [0.5, 0.5], atol=1e-6)
        assert record["residual"] <= 1e-6
        assert record["certificate"]["delta"] == pytest.approx(0.757937, abs=1e-6)
    assert len(doc["timings"]) == 3

def test_solve_report_byte_stable(capsys, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run(capsys, "solve", "example2.json", "--out", str(a))
    run(capsys, "solve", "example2.json", "--out", str(b))
    da = json.loads(a.read_text())
    db = json.loads(b.read_text())
    da.pop("timings")
    db.pop("timings")
    assert json.dumps(da, sort_keys=True) == json.dumps(db, sort_keys=True)

def test_solve_iteration_cap_exits_three_with_partial_trace(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "solve", "example2.json", "--max-iter", "1",
                     "--trace", "--out", str(out))
    assert code == 3
    trace = tmp_path / "r_start0.csv"
    assert trace.exists()
    rows = list(csv.DictReader(trace.open()))
    assert len(rows) == 1

def test_solve_missing_file_exits_two(capsys):
    code, _, err = run(capsys, "solve", "no_such_file.json")
    assert code == 2
    assert "no such problem file" in err

def test_solve_schema_error_exits_two(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 2}), encoding="utf-8")
    code, _, err = run(capsys, "solve", str(bad))
    assert code == 2
    assert "operator" in err


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def test_compare_single_start_file(capsys, tmp_path):
    # single-start problem: table covers exactly that start
    import qvikit.problemfile as pf
    with open(pf.bundled_problem_path("example2.json"), encoding="utf-8") as f:
        single = json.load(f)
    single["starts"] = single["starts"][:1]
    p = tmp_path / "single.json"
    p.write_text(json.dumps(single), encoding="utf-8")
    out = tmp_path / "single_report.json"
    code, _, _ = run(capsys, "compare", str(p), "--out", str(out))
    assert code == 0
    report = json.loads(out.read_text())
    assert {r["start"] for r in report["runs"]} == {0}
    assert len(report["runs"]) == 2  # one row per algorithm for the start


def test_compare_table_and_dominance(capsys, tmp_path):
    out = tmp_path / "cmp.json"
    code, text, _ = run(capsys, "compare", "example2.json", "--out", str(out))
    assert code == 0
    assert "algorithm" in text and "baseline" in text
    doc = json.loads(out.read_text())
    by_start = {}
    for record in doc["runs"]:
        by_start.setdefault(record["start"], {})[record["algorithm"]] = record
    for start, records in by_start.items():
        assert records["dr"]["iterations"] <= 12
        assert records["dr"]["iterations"] < records["baseline"]["iterations"]
        # both algorithms agree on the limit
        assert np.allclose(records["dr"]["final_x"],
                           records["baseline"]["final_x"], atol=1e-7)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_benchmark_passes(capsys):
    code, text, _ = run(capsys, "verify", "example2.json",
                        "--samples", "5000")
    assert code == 0
    for tag in ("[A1]", "[A2]", "[A3]", "[A4]"):
        assert tag in text
    assert "feasible, delta=0.757937" in text
    assert "FAIL" not in text

def test_verify_segment_family_flags_violation(capsys):
    code, text, _ = run(capsys, "verify", "segment_family.json",
                        "--samples", "5000")
    assert code == 0
    assert "[A4]" in text and "FAIL" in text
    assert "witness" in text

def test_verify_gamma_violation_surfaced(capsys, tmp_path):
    doc = {
        "dim": 2,
        "operator": {"kind": "affine", "matrix": [[0.25, 0], [0, 0.5]],
                     "L": 0.5, "mu": 0.25},
        "base_set": {"kind": "box", "bounds": {"lower": [0, 0], "upper": [1, 1]}},
        "moving_set": {"kind": "translated-base",
                       "base": {"kind": "box",
                                "bounds": {"lower": [0, 0], "upper": [1, 1]}},
                       "shift_matrix": [["1/64", 0], [0, "1/64"]],
                       "lipschitz_l": "1/64"},
        "starts": [{"x0": [0, 1], "y0": [0, 1]}],
    }
    p = tmp_path / "gamma2.json"
    p.write_text(json.dumps(doc), encoding="utf-8")
    code, text, _ = run(capsys, "verify", str(p), "--samples", "2000")
    assert code == 0
    assert "gamma < 5/3" in text


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def test_bench_writes_dominated_trace(capsys, tmp_path):
    out = tmp_path / "bench.csv"
    code, text, _ = run(capsys, "bench", "example2.json",
                        "--repeats", "2", "--out", str(out))
    assert code == 0
    assert "median_elapsed_s" in text
    rows = list(csv.DictReader(out.open()))
    assert rows, "trace is empty"
    assert list(rows[0]) == ["iter", "dz", "dy", "dx", "residual", "bound"]
    for row in rows:
        assert float(row["residual"]) <= float(row["bound"])

def test_bench_iterations_deterministic_across_repeats(capsys, tmp_path):
    code, text, _ = run(capsys, "bench", "example2.json", "--repeats", "3",
                        "--out", str(tmp_path / "b.csv"))
    assert code == 0
    # a constant iteration count prints as a single number, not a range
    for line in text.splitlines():
        if "dr" in line or "baseline" in line:
            assert "-" not in line.split()[2]

def test_bench_single_repeat(capsys, tmp_path):
    code, _, _ = run(capsys, "bench", "example2.json", "--repeats", "1",
                     "--out", str(tmp_path / "b.csv"))
    assert code == 0
