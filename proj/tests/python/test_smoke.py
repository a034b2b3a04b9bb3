import json
import math
import pathlib

import pytest

import hilbertctl

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def test_example_ids():
    assert "ex4" in hilbertctl.example_ids()


def test_closed_form_upsilon():
    cf = hilbertctl.example4_closed_form(2.0, 0.0)
    assert cf["upsilon1"] == pytest.approx(0.1, abs=1e-15)
    assert cf["upsilon2"] == pytest.approx(-0.4, abs=1e-15)


def test_lq_solve_from_path():
    r = hilbertctl.lq_solve(DATA / "scalar_lq.json")
    assert r["solution"]["riccati"]["status"] == "Solved"
    assert math.isfinite(r["solution"]["optimal_value"])


def test_brl_and_norm_on_shipped_system():
    path = DATA / "ex3_system.json"
    assert hilbertctl.brl_check(path, 1.7)["feasible"]
    assert not hilbertctl.brl_check(path, 1.6)["feasible"]
    norm = hilbertctl.hinf_norm(path, tol_gamma=1e-8)["norm"]
    assert norm == pytest.approx(hilbertctl.example3_norm(), abs=1e-7)


def test_dict_input_and_game():
    doc = json.loads((DATA / "ex4_system.json").read_text())
    r = hilbertctl.h2hinf_design(doc, 2.0)
    assert r["J2"] == pytest.approx(2.74, abs=1e-10)
    assert r["attenuation_verified"]


def test_example_report():
    r = hilbertctl.run_example("ex4", dim=16)
    assert r["all_pass"]


def test_errors_map_to_python_exceptions():
    with pytest.raises(hilbertctl.AssumptionError):
        hilbertctl.brl_check(DATA / "assumption1_violation.json", 2.0)
    with pytest.raises(hilbertctl.ParseError):
        hilbertctl.run_example("ex9")
    with pytest.raises(hilbertctl.ResolutionError):
        hilbertctl.run_example("ex3", dim=4)
    with pytest.raises(hilbertctl.DesignInfeasibleError):
        hilbertctl.hinf_design(DATA / "ex4_system.json", 0.5)
    assert issubclass(hilbertctl.ParseError, hilbertctl.HilbertctlError)
