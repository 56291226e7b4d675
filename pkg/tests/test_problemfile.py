import copy
import json

import numpy as np
import pytest

from qvikit.problemfile import (ProblemFileError, bundled_problem_path,
                                load_problem, parse_document, to_document,
                                write_problem)
from qvikit.sets import Polytope, SegmentFamily, TranslatedSet


@pytest.fixture(scope="module")
def doc():
    with open(bundled_problem_path("example2.json"), encoding="utf-8") as f:
        return json.load(f)


def test_bundled_benchmark_parses(doc):
    bundle = parse_document(doc)
    prob = bundle.problem
    assert prob.dim == 2
    assert isinstance(prob.C, Polytope)
    assert isinstance(prob.phi, TranslatedSet)
    assert prob.phi.lipschitz_l == 1.0 / 64.0  # "1/64" parsed exactly
    assert np.allclose(prob.phi.shift, np.eye(2) / 64.0)
    assert prob.T.L == pytest.approx(0.25)
    assert bundle.dr_params.xi == 4.0
    assert bundle.dr_params.tol == 1e-8
    assert len(bundle.starts) == 3

def test_fraction_strings_are_exact():
    bundle = parse_document({
        "dim": 1,
        "operator": {"kind": "affine", "matrix": [["1/4"]]},
        "base_set": {"kind": "box", "bounds": {"lower": ["-1/2"], "upper": ["1/2"]}},
        "moving_set": {"kind": "translated-base",
                       "base": {"kind": "box",
                                "bounds": {"lower": [0], "upper": [1]}},
                       "shift_matrix": [["1/128"]], "lipschitz_l": "1/128"},
        "starts": [{"x0": [0], "y0": [0]}],
    })
    assert bundle.problem.T.matrix[0, 0] == 0.25
    assert bundle.problem.phi.shift[0, 0] == 1.0 / 128.0

def test_round_trip_is_identity(doc, tmp_path):
    bundle = parse_document(doc)
    path = tmp_path / "roundtrip.json"
    write_problem(path, bundle)
    again = load_problem(path)
    assert to_document(bundle) == to_document(again)
    assert bundle.problem_hash == again.problem_hash

def test_segment_family_file_parses():
    bundle = load_problem(bundled_problem_path("segment_family.json"))
    assert isinstance(bundle.problem.phi, SegmentFamily)
    assert bundle.problem.phi.lipschitz_l == 1.0

def test_missing_operator_names_field(doc):
    bad = copy.deepcopy(doc)
    del bad["operator"]
    with pytest.raises(ProblemFileError, match="operator"):
        parse_document(bad)

def test_bad_matrix_entry_names_path(doc):
    bad = copy.deepcopy(doc)
    bad["operator"]["matrix"][0][0] = "not-a-number"
    with pytest.raises(ProblemFileError, match=r"operator\.matrix\[0\]\[0\]"):
        parse_document(bad)

def test_declared_constant_mismatch_rejected(doc):
    bad = copy.deepcopy(doc)
    bad["operator"]["L"] = 0.5
    with pytest.raises(ProblemFileError, match=r"operator\.L"):
        parse_document(bad)

def test_unknown_set_kind_rejected(doc):
    bad = copy.deepcopy(doc)
    bad["base_set"] = {"kind": "sphere"}
    with pytest.raises(ProblemFileError, match="base_set.kind"):
        parse_document(bad)

def test_empty_starts_rejected(doc):
    bad = copy.deepcopy(doc)
    bad["starts"] = []
    with pytest.raises(ProblemFileError, match="starts"):
        parse_document(bad)

def test_dim_mismatch_in_start(doc):
    bad = copy.deepcopy(doc)
    bad["starts"][0]["x0"] = [0, 1, 2]
    with pytest.raises(ProblemFileError, match=r"starts\[0\]\.x0"):
        parse_document(bad)

def test_gamma_step_and_seed_flow_through(doc):
    d = copy.deepcopy(doc)
    d["params"]["gamma_step"] = 2.5
    d["params"]["seed"] = 17
    bundle = parse_document(d)
    assert bundle.baseline_params.gamma_step == 2.5
    assert bundle.baseline_params.seed == 17

def test_defaults_when_params_omitted(doc):
    d = copy.deepcopy(doc)
    del d["params"]
    bundle = parse_document(d)
    assert bundle.dr_params.xi == 4.0  # 1/L
    assert bundle.dr_params.beta == pytest.approx(2.0 / 64.0)
    assert bundle.dr_params.tol == 1e-8
    assert bundle.dr_params.max_iter == 100_000

def test_invalid_json_reports_input_error(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json", encoding="utf-8")
    with pytest.raises(ProblemFileError, match="JSON"):
        load_problem(p)
