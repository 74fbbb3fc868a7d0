import json
import time

import pytest

from constraint_mcp.backends.minizinc import (
    MiniZincBackend, MznConfig, MznRawResult, is_optimization, item_diagnostics, mzn_parse_result, mzn_validate,
    outcome_from_raw, strip_comments,
)
from conftest import FIXTURES, needs_mzn


def stream(*msgs):
    return MznRawResult("\n".join(json.dumps(m) for m in msgs) + "\n", "", 0, False)


def sol(**values):
    return {"type": "solution", "output": {"json": values}}


def test_single_solution_then_complete():
    p = mzn_parse_result(stream(sol(x=3, _objective=3), {"type": "status", "status": "OPTIMAL_SOLUTION"}), True)
    assert p.assignments == {"x": 3} and p.proven_optimal and p.objective == 3


def test_last_solution_wins_and_monotone():
    raw = stream(sol(tour=[1, 2], _objective=1700), sol(tour=[1, 3], _objective=1564),
                 {"type": "status", "status": "OPTIMAL_SOLUTION"})
    p = mzn_parse_result(raw, True)
    assert p.objective == 1564 and p.assignments == {"tour": [1, 3]}
    assert all(a >= b for a, b in zip(p.objectives, p.objectives[1:]))


def test_unsat_marker():
    p = mzn_parse_result(stream({"type": "status", "status": "UNSATISFIABLE"}), False)
    assert p.proven_unsat and p.assignments == {}


def test_nested_arrays_sets_enums():
    p = mzn_parse_result(stream(sol(m=[[1, 2], [3, 4]], s={"set": [[1, 3], 7]}, c={"e": "red"})), False)
    assert p.assignments == {"m": [[1, 2], [3, 4]], "s": [1, 2, 3, 7], "c": "red"}


def test_garbage_stream_is_error():
    out = outcome_from_raw(MznRawResult("this is not json\n", "segfault", 139, False), False, 5)
    assert out.status == "error" and "segfault" in out.detail


def test_partial_solution_on_timeout_not_optimal():
    raw = MznRawResult(json.dumps(sol(x=9, _objective=9)) + "\n", "", None, True)
    out = outcome_from_raw(raw, True, 1)
    assert out.status == "sat" and not out.proven_optimal and out.values["_optimal"] is False


def test_timeout_without_solution():
    assert outcome_from_raw(MznRawResult("", "", None, True), False, 1).status == "timeout"


def test_missing_semicolon_item_check():
    (d,) = item_diagnostics(["var int: x"])
    assert d.line == 1 and "';'" in d.message
    assert item_diagnostics(["var int: x; % trailing comment", "constraint x > 1; /* c */"]) == []
    (d,) = item_diagnostics(["var int: x;", "array[1..2] of int: a =\n  [1, 2]"])
    assert d.line == 3


def test_optimization_detection():
    assert is_optimization("var int: x;\nsolve minimize x;")
    assert not is_optimization("% solve minimize x;\nsolve satisfy;")
    assert "minimize" not in strip_comments("/* solve minimize */ solve satisfy;")


def test_missing_executable_is_unavailable():
    (d,) = mzn_validate("var int: x;", MznConfig(executable_path=None))
    assert "solver unavailable" in d.message
    s = MiniZincBackend(MznConfig(executable_path=None)).solve(["var int: x;", "solve satisfy;"], 1)
    assert s.status == "error" and "not found" in s.message


@needs_mzn
def test_validate_examples():
    cfg = MznConfig.discover()
    assert mzn_validate("var int: x; constraint x > 1; solve satisfy;", cfg) == []
    (d,) = mzn_validate("constraint y > 1; solve satisfy;", cfg)
    assert d.is_error and "undefined identifier `y'" in d.message and d.line == 1


@needs_mzn
def test_missing_solve_warns():
    diags = MiniZincBackend().validate(["var int: x;"])
    assert len(diags) == 1 and not diags[0].is_error and "solve" in diags[0].message


@needs_mzn
def test_unsat_empty_domain():
    s = MiniZincBackend().solve(["var 1..2: x;", "constraint x > 5;", "solve satisfy;"], 10)
    assert s.status == "unsat" and not s.satisfiable


@needs_mzn
def test_tsp_fixture():
    items = json.loads((FIXTURES / "tsp_items.json").read_text())
    s = MiniZincBackend().solve(items, 30)
    assert s.status == "sat" and s.objective == 1564 and s.values["_optimal"] is True
    tour = s.values["tour"]
    assert tour[0] == 1 and sorted(tour) == list(range(1, 10))


@needs_mzn
def test_validation_soundness_over_fixtures():
    b = MiniZincBackend()
    corpus = [json.loads((FIXTURES / "tsp_items.json").read_text()),
              ["var 1..3: x;", "var set of 1..3: s;", "constraint x in s;", "solve satisfy;"]]
    for items in corpus:
        assert not [d for d in b.validate(items) if d.is_error]
        assert b.solve(items, 30).status in ("sat", "unsat")


@needs_mzn
def test_hard_instance_times_out():
    items = ["int: p = 13;", "int: h = 12;", "array[1..p] of var 1..h: hole;",
             "constraint forall(i, j in 1..p where i < j) (hole[i] != hole[j]);", "solve satisfy;"]
    t = time.monotonic()
    s = MiniZincBackend().solve(items, 1.0)
    assert s.status == "timeout" and s.success and time.monotonic() - t < 2
