import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from constraint_mcp.backends.cdcl import Solver, luby, solve_cnf
from constraint_mcp.backends.cnf import (
    CnfFormula, atleast_clauses, atmost_clauses, compile_items, decode, from_dimacs, to_dimacs,
)
from constraint_mcp.backends.sat import SatBackend, parse_competition_output
from constraint_mcp.backends.sat_items import KEYWORDS, parse_items

from oracles import expected_count, holds, pigeonhole, projected_models, satisfies, simple_dpll, truth_table_sat


# --- item language ------------------------------------------------------------

def test_parse_two_items():
    items, diags = parse_items(["var x y", "clause x -y"])
    assert diags == []
    assert [i.form for i in items] == ["var_decl", "clause"]
    assert items[1].names == ("x", "y") and items[1].negated == (False, True)


def test_undeclared_variable():
    _, diags = parse_items(["clause x"])
    assert any(d.is_error and "undeclared variable x" in d.message for d in diags)


def test_duplicate_declaration():
    _, diags = parse_items(["var x", "var x"])
    errs = [d for d in diags if d.is_error]
    assert len(errs) == 1 and "duplicate declaration" in errs[0].message
    assert errs[0].line == 2


def test_unknown_keyword_lists_all_keywords():
    _, diags = parse_items(["var a", "clase a"])
    (d,) = [d for d in diags if d.is_error]
    assert d.line == 2
    for kw in KEYWORDS:
        assert kw in d.suggestion
    assert "clause" in d.suggestion.split("?")[0]


@pytest.mark.parametrize("item", ["atmost 4 a b c", "atleast -1 a b", "exactly x a b", "atmost 1 a -b", "clause"])
def test_bad_statements_rejected(item):
    _, diags = parse_items(["var a b c", item])
    assert any(d.is_error for d in diags)


def test_multi_line_item_line_numbers():
    _, diags = parse_items(["var a\nvar b", "clause a\nclause zz"])
    (d,) = [d for d in diags if d.is_error]
    assert d.line == 4


def test_comments_ignored():
    items, diags = parse_items(["var a  # first", "# note\nclause a"])
    assert not [d for d in diags if d.is_error]
    assert len(items) == 2


# --- encoding -----------------------------------------------------------------

def _card_formula(form, n, k):
    names = [f"v{i}" for i in range(n)]
    items, diags = parse_items(["var " + " ".join(names), f"{form} {k} " + " ".join(names)])
    assert not [d for d in diags if d.is_error]
    return compile_items(items)


@pytest.mark.parametrize("form", ["atmost", "atleast", "exactly"])
@pytest.mark.parametrize("n", range(1, 6))
def test_cardinality_exact_counts(form, n):
    for k in range(0, n + 1):
        cnf = _card_formula(form, n, k)
        models = projected_models(n, cnf.clauses)
        assert len(models) == expected_count(form, n, k), (form, n, k)
        assert all(holds(form, bits, k) for bits in models)


def test_atmost1_of_3_has_4_solutions():
    cnf = _card_formula("atmost", 3, 1)
    assert len(projected_models(3, cnf.clauses, brute_force_limit=30)) == 4


def test_exactly1_of_3_has_3_solutions():
    cnf = _card_formula("exactly", 3, 1)
    assert len(projected_models(3, cnf.clauses, brute_force_limit=30)) == 3


def test_atmost0_is_unit():
    assert atmost_clauses([1], 0, iter(range(2, 9)).__next__) == [[-1]]


def test_sequential_counter_size():
    fresh = iter(range(6, 100))
    clauses = atmost_clauses([1, 2, 3, 4, 5], 2, fresh.__next__)
    assert next(fresh) == 6 + 5 * 2  # |S| * k auxiliaries
    assert all(abs(l) < 16 for c in clauses for l in c)
    assert atleast_clauses([1, 2], 0, fresh.__next__) == []


def test_compile_deterministic():
    src = ["var a b c d", "exactly 2 a b c d", "clause -a b", "atleast 1 c d"]
    c1 = compile_items(parse_items(src)[0])
    c2 = compile_items(parse_items(list(src))[0])
    assert c1 == c2
    assert to_dimacs(c1) == to_dimacs(c2)


def test_dimacs_round_trip():
    cnf = compile_items(parse_items(["var a b c", "exactly 1 a b c", "clause a b"])[0])
    text = to_dimacs(cnf)
    header = [l for l in text.splitlines() if l.startswith("p ")]
    assert header == [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    back = from_dimacs(text)
    assert back.clauses == cnf.clauses and back.num_vars == cnf.num_vars and back.name_map == cnf.name_map


def test_decode_projects_base_only():
    cnf = CnfFormula(1, 1, [], {"x": 1})
    assert decode({1: True, 2: False}, cnf) == {"x": True}
    assert decode({}, CnfFormula(0)) == {}
    cnf3 = CnfFormula(3, 6, [], {"a": 1, "b": 2, "c": 3})
    assert len(decode({v: True for v in range(1, 10)}, cnf3)) == 3


# --- solver -------------------------------------------------------------------

def test_unit_and_contradiction():
    r = solve_cnf(1, [[1]])
    assert r.result == "sat" and r.assignment == {1: True}
    assert solve_cnf(1, [[1], [-1]]).result == "unsat"


def test_pigeonhole_3_2_unsat_matches_brute_force():
    n, clauses = pigeonhole(3, 2)
    assert truth_table_sat(n, clauses) is None
    assert solve_cnf(n, clauses).result == "unsat"
    assert solve_cnf(n, clauses, learning=False).result == "unsat"


def random_cnf(rng, max_vars=4, max_clauses=6):
    n = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(0, max_clauses)):
        width = rng.randint(1, 3)
        clauses.append([rng.choice((1, -1)) * rng.randint(1, n) for _ in range(width)])
    return n, clauses


def test_oracle_equivalence_random():
    rng = random.Random(7)
    for _ in range(600):
        n, clauses = random_cnf(rng)
        ref = truth_table_sat(n, clauses)
        for learning in (True, False):
            r = solve_cnf(n, clauses, learning=learning)
            assert (r.result == "sat") == (ref is not None), (n, clauses)
            if r.result == "sat":
                assert satisfies(r.assignment, clauses)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.lists(st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v])), min_size=1, max_size=4),
             max_size=25))))
def test_cdcl_agrees_with_dpll(case):
    n, clauses = case
    r = solve_cnf(n, clauses)
    assert (r.result == "sat") == simple_dpll(clauses)
    if r.result == "sat":
        assert satisfies(r.assignment, clauses)
        assert set(r.assignment) == set(range(1, n + 1))


def test_learned_clauses_are_entailed():
    rng = random.Random(3)
    checked = 0
    for _ in range(200):
        n = rng.randint(5, 9)
        clauses = [[rng.choice((1, -1)) * rng.randint(1, n) for _ in range(3)] for _ in range(rng.randint(20, 45))]
        s = Solver(n, clauses)
        res = s.solve()
        for lc in s.learned:
            # F and not(lc) must be unsat, re-checked with learning disabled
            blocked = clauses + [[-l] for l in lc]
            assert solve_cnf(n, blocked, learning=False).result == "unsat"
            checked += 1
        if res.result == "unsat":
            assert solve_cnf(n, clauses, learning=False).result == "unsat"
    assert checked > 0


def test_branching_order_by_occurrence():
    s = Solver(3, [[3, 2], [3, -2], [-3, 1]])
    assert s.order == [3, 2, 1]


def test_timeout_on_hard_instance():
    n, clauses = pigeonhole(11, 10)
    t = time.monotonic()
    r = solve_cnf(n, clauses, timeout_s=0.5)
    assert r.result == "timeout" and r.assignment is None
    assert time.monotonic() - t < 0.6


def test_luby_prefix():
    assert [luby(i) for i in range(1, 16)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


# --- backend ------------------------------------------------------------------

def test_backend_solve_sat_and_unsat():
    b = SatBackend()
    sol = b.solve(["var x y", "clause x", "clause -x y"], 5)
    assert sol.status == "sat" and sol.values == {"x": True, "y": True}
    sol = b.solve(["var x", "clause x", "clause -x"], 5)
    assert sol.status == "unsat" and sol.values == {}


def test_backend_exactly_k_queens_row():
    b = SatBackend()
    sol = b.solve(["var a b c d", "exactly 2 a b c d", "clause -a", "clause -b"], 5)
    assert sol.status == "sat" and sol.values == {"a": False, "b": False, "c": True, "d": True}


def test_competition_output_parsing():
    cnf = CnfFormula(2, 1, [], {"x": 1, "y": 2})
    assert parse_competition_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", cnf) == ("sat", {1: True, 2: False, 3: True})
    assert parse_competition_output("s UNSATISFIABLE\n", cnf)[0] == "unsat"
    with pytest.raises(ValueError):
        parse_competition_output("garbage", cnf)
