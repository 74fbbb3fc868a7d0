import math

import pytest
from hypothesis import given, strategies as st

from constraint_mcp.solution import (
    SOLUTION_FIELDS, BackendOutcome, Solution, SolutionInvariantError, classify_error, error_solution, normalize,
)


def test_sat_example():
    s = normalize(BackendOutcome("sat", {"x": True}), 0.01, "sat")
    assert s.to_dict() == {"status": "sat", "satisfiable": True, "values": {"x": True}, "objective": None,
                           "solve_time": 0.01, "success": True, "message": s.message}


def test_optimum_message_notes_optimality():
    s = normalize(BackendOutcome("sat", {"tour": [1]}, 1564, True, True), 2.0, "minizinc")
    assert s.objective == 1564 and "optimal" in s.message.lower() and "proven" in s.message


def test_timeout_example():
    s = normalize(BackendOutcome("timeout", timeout_s=1.0), 1.0, "smt")
    assert (s.status, s.satisfiable, s.success) == ("timeout", False, True)
    assert "1 s" in s.message and "time limit" in s.message


def test_objective_dropped_for_satisfaction_and_non_sat():
    assert normalize(BackendOutcome("sat", {}, 5, False), 0, "sat").objective is None
    assert normalize(BackendOutcome("unsat", {"x": 1}, 5, True), 0, "sat").values == {}


@pytest.mark.parametrize("bad", [
    dict(status="sat", satisfiable=False),
    dict(status="unsat", satisfiable=True),
    dict(status="timeout", success=False),
    dict(status="error", success=True),
    dict(solve_time=-1.0),
    dict(solve_time=math.inf),
    dict(message=""),
    dict(status="passed"),
])
def test_invariants_enforced(bad):
    base = dict(status="unsat", satisfiable=False, values={}, objective=None, solve_time=0.0, success=True,
                message="m")
    base.update(bad)
    if base["status"] == "error" and "success" not in bad:
        base["success"] = False
    with pytest.raises(SolutionInvariantError):
        Solution(**base)


@given(st.sampled_from(["sat", "unsat", "timeout", "error", "weird"]), st.floats(allow_nan=True),
       st.booleans(), st.dictionaries(st.text(max_size=4), st.integers(), max_size=3))
def test_normalize_total(status, t, opt, values):
    s = normalize(BackendOutcome(status, values, 3 if opt else None, opt), t, "sat")
    assert set(s.to_dict()) == set(SOLUTION_FIELDS)
    assert (s.status == "sat") == s.satisfiable
    assert s.success == (s.status != "error")
    assert s.solve_time >= 0 and math.isfinite(s.solve_time)


def test_round_trip_dict():
    s = error_solution("boom", 0.2)
    assert Solution.from_dict(s.to_dict()) == s


def test_classify_error():
    t = classify_error("edit_validation", ["d1", "d2"])
    assert t.tier == "validation" and t.detail == ["d1", "d2"] and t.channel == "rejected_edit"
    assert classify_error("solver_run", "spawn").channel == "error_solution"
    assert classify_error("transport", -32700).channel == "jsonrpc_error"
    with pytest.raises(ValueError):
        classify_error("nope", None)
