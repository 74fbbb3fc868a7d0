import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest
from hypothesis import given, settings, strategies as st

from constraint_mcp.cli import main
from conftest import FIXTURES, needs_mzn

SCHEMA = json.loads(resources.files("constraint_mcp").joinpath("schemas/client_report.schema.json").read_text())

SAT_SCRIPT = [
    {"assistant_text": "", "tool_calls": [
        {"name": "clear_model", "arguments": {}},
        {"name": "add_item", "arguments": {"index": 1, "content": "var a b"}},
        {"name": "add_item", "arguments": {"index": 2, "content": "clause a b"}},
        {"name": "add_item", "arguments": {"index": 3, "content": "clause -a"}},
        {"name": "solve_model", "arguments": {"timeout": 5}}]},
    {"assistant_text": "b is true, a is false.", "tool_calls": []},
    {"role": "reviewer", "assistant_text": "CORRECT: b holds and a does not."},
]


def run_cli(*args, stdin=""):
    return subprocess.run([sys.executable, "-m", "constraint_mcp", *args], input=stdin,
                          capture_output=True, text=True, timeout=60)


@pytest.fixture
def sat_files(tmp_path):
    script = tmp_path / "script.json"
    script.write_text(json.dumps(SAT_SCRIPT))
    problem = tmp_path / "problem.txt"
    problem.write_text("Make b true and a false while keeping a or b.")
    return str(problem), str(script)


def test_serve_exits_cleanly_on_eof():
    p = run_cli("serve", "--mode", "sat")
    assert p.returncode == 0 and p.stdout == ""


def test_serve_answers_over_stdio():
    lines = [
        {"jsonrpc": "2.0", "id": 1, "method": "initialize", "params": {"protocolVersion": "2025-06-18",
                                                                        "capabilities": {}, "clientInfo": {"name": "t", "version": "0"}}},
        {"jsonrpc": "2.0", "method": "notifications/initialized"},
        {"jsonrpc": "2.0", "id": 2, "method": "tools/list"},
    ]
    p = run_cli("serve", "--mode", "pysat", stdin="".join(json.dumps(m) + "\n" for m in lines))
    out = [json.loads(x) for x in p.stdout.splitlines()]
    assert [m["id"] for m in out] == [1, 2]
    assert len(out[1]["result"]["tools"]) == 6


@pytest.mark.parametrize("argv", [
    ["serve"],
    ["serve", "--mode", "sat", "--mode", "smt"],
    ["serve", "--mode", "prolog"],
    ["serve", "--mode", "sat", "--max-timeout", "0"],
    ["client", "--mode", "sat", "--problem", "x"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_client_missing_problem_file(tmp_path, capsys):
    script = tmp_path / "s.json"
    script.write_text("[]")
    assert main(["client", "--mode", "sat", "--problem", str(tmp_path / "nope"), "--script", str(script)]) == 2


@settings(max_examples=25, deadline=None)
@given(st.permutations([("--mode", "sat"), ("--max-timeout", "12"), ("--step-limit", "9"), ("--json", None)]))
def test_flag_order_does_not_matter(tmp_path_factory, perm):
    d = tmp_path_factory.mktemp("perm")
    (d / "s.json").write_text(json.dumps(SAT_SCRIPT))
    (d / "p.txt").write_text("problem")
    argv = ["client", "--problem", str(d / "p.txt"), "--script", str(d / "s.json")]
    for flag, val in perm:
        argv += [flag] if val is None else [flag, val]
    args = __import__("constraint_mcp.cli", fromlist=["build_parser"]).build_parser().parse_args(argv)
    assert args.mode == ["sat"] and args.max_timeout == 12.0 and args.step_limit == 9 and args.json


def test_client_json_report_matches_schema(sat_files, capsys):
    problem, script = sat_files
    assert main(["client", "--mode", "sat", "--problem", problem, "--script", script, "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    jsonschema.validate(report, SCHEMA)
    assert report["solution"]["values"] == {"a": False, "b": True}
    assert report["verdict"]["verdict"] == "correct"
    assert report["stats"]["add_count"] == 3


def test_client_human_output_ends_with_json(sat_files):
    problem, script = sat_files
    p = run_cli("client", "--mode", "sat", "--problem", problem, "--script", script, "--spawn")
    assert p.returncode == 0, p.stderr
    lines = p.stdout.strip().splitlines()
    assert any(l.startswith("verdict: CORRECT") for l in lines)
    assert any(l.startswith("stats: C=1 A=3") for l in lines)
    jsonschema.validate(json.loads(lines[-1]), SCHEMA)


def test_incorrect_verdict_exits_1(sat_files, tmp_path, capsys):
    problem, _ = sat_files
    bad = SAT_SCRIPT[:-1] + [{"role": "reviewer", "assistant_text": "INCORRECT: wrong"}]
    s = tmp_path / "bad.json"
    s.write_text(json.dumps(bad))
    assert main(["client", "--mode", "sat", "--problem", problem, "--script", str(s), "--json"]) == 1


@needs_mzn
def test_tsp_replay_cli(capsys):
    rc = main(["client", "--mode", "minizinc", "--problem", str(FIXTURES / "tsp.txt"),
               "--script", str(FIXTURES / "tsp_replay.json"), "--json"])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0
    jsonschema.validate(report, SCHEMA)
    assert report["solution"]["objective"] == 1564
    assert report["stats"]["clear_count"] == 1 and report["stats"]["solve_count"] == 1
