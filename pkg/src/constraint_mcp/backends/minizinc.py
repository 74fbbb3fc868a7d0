"""MiniZinc items validated and solved by an external MiniZinc executable."""

from __future__ import annotations

import json
import os
import re
import tempfile
from dataclasses import dataclass

from .. import diagnostics as dg
from .. import sandbox
from ..solution import BackendOutcome, Solution, error_solution, normalize
from .base import Backend, discover_executable

SOLVE_FLAGS = ("--json-stream", "--output-mode", "json", "--output-objective", "-i")

# status markers in the json stream
_COMPLETE = {"OPTIMAL_SOLUTION", "ALL_SOLUTIONS"}
_UNSAT = {"UNSATISFIABLE"}

_TEXT_ERROR = re.compile(r"^(?P<file>[^:\n]*\.mzn):(?P<line>\d+)(?:\.(?P<col>\d+))?", re.M)
_SOLVE_ITEM = re.compile(r"(^|;)\s*solve\b", re.M)
_OPT_SOLVE = re.compile(r"(^|;)\s*solve\b[^;]*\b(minimize|maximize)\b", re.M)


@dataclass
class MznConfig:
    executable_path: str | None = None
    solver_tag: str = "gecode"
    flatten_timeout_s: float = 10.0

    @classmethod
    def discover(cls, explicit: str | None = None, **kw) -> "MznConfig":
        return cls(executable_path=discover_executable(explicit, "MCP_SOLVER_MZN", ("minizinc",)), **kw)


@dataclass
class MznRawResult:
    stdout_text: str
    stderr_text: str
    exit_code: int | None
    timed_out: bool


@dataclass
class MznParsed:
    assignments: dict
    objective: float | int | None
    proven_optimal: bool
    proven_unsat: bool
    objectives: list  # every objective seen, in stream order
    errors: list  # json error messages


def strip_comments(text: str) -> str:
    """Blank out % line comments and /* */ blocks, keeping newlines and
    string literals intact."""
    out, i, n = [], 0, len(text)
    while i < n:
        c = text[i]
        if c == '"':
            j = i + 1
            while j < n and text[j] != '"' and text[j] != "\n":
                j += 2 if text[j] == "\\" else 1
            out.append(text[i:j + 1])
            i = j + 1
        elif c == "%":
            j = text.find("\n", i)
            j = n if j < 0 else j
            out.append(" " * (j - i))
            i = j
        elif text.startswith("/*", i):
            j = text.find("*/", i + 2)
            j = n if j < 0 else j + 2
            out.append("".join(ch if ch == "\n" else " " for ch in text[i:j]))
            i = j
        else:
            out.append(c)
            i += 1
    return "".join(out)


def is_optimization(model_text: str) -> bool:
    return bool(_OPT_SOLVE.search(strip_comments(model_text)))


def item_diagnostics(items) -> list[dg.Diagnostic]:
    """Checks that need item boundaries: every item must end with ';'.

    The MiniZinc parser accepts a final item without its terminator, which
    would let "var int: x" through as one item and break on the next add.
    """
    diags, line = [], 1
    for text in items:
        code = strip_comments(text).rstrip()
        if code and not code.endswith(";"):
            rows = code.split("\n")
            diags.append(dg.error(line + len(rows) - 1, "syntax error: missing ';' at end of item",
                                  len(rows[-1]) + 1, suggestion="terminate every MiniZinc item with ';'"))
        line += text.count("\n") + 1
    return diags


def parse_checker_output(raw: MznRawResult, n_lines: int) -> list[dg.Diagnostic]:
    diags = []
    for line in raw.stdout_text.splitlines():
        msg = _json_line(line)
        if not msg or msg.get("type") not in ("error", "warning"):
            continue
        loc = msg.get("location") or {}
        if not loc and msg.get("stack"):
            loc = msg["stack"][0].get("location") or {}
        what = msg.get("what")
        text = msg.get("message", "")
        text = f"{what}: {text}" if what and what not in text else text
        ln = min(max(1, int(loc.get("firstLine", 1))), max(1, n_lines))
        col = int(loc.get("firstColumn", 0))
        maker = dg.error if msg["type"] == "error" else dg.warning
        diags.append(maker(ln, text.strip() or "MiniZinc reported an error", col))
    if not any(d.is_error for d in diags) and raw.exit_code not in (0, None):
        diags.extend(_text_errors(raw.stderr_text + "\n" + raw.stdout_text))
    return diags


def _text_errors(text: str) -> list[dg.Diagnostic]:
    """Fallback for the plain "file:line.col" error format."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    diags = []
    for i, ln in enumerate(lines):
        m = _TEXT_ERROR.match(ln.strip())
        if not m:
            continue
        msg = next((x.strip() for x in lines[i + 1:] if x.strip().lower().startswith("error")), None)
        msg = msg or next((x.strip() for x in lines[:i] if "rror" in x), "MiniZinc reported an error")
        diags.append(dg.error(int(m["line"]), msg.removeprefix("Error: "), int(m["col"] or 0)))
    if not diags and lines:
        diags.append(dg.error(1, lines[-1][:300]))
    return diags


def _json_line(line: str):
    line = line.strip()
    if not line.startswith("{"):
        return None
    try:
        return json.loads(line)
    except json.JSONDecodeError:
        return None


def _norm_value(v):
    if isinstance(v, dict):
        if set(v) == {"set"}:
            out = []
            for part in v["set"]:
                if isinstance(part, list):
                    out.extend(range(part[0], part[1] + 1))
                else:
                    out.append(part)
            return sorted(out)
        if set(v) == {"e"}:
            return v["e"]
        return {k: _norm_value(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_norm_value(x) for x in v]
    return v


def mzn_parse_result(raw: MznRawResult, is_opt: bool) -> MznParsed:
    """Read a json-stream run. The last solution wins.

    Raises ValueError when stdout has content but no recognizable message.
    """
    assignments, objective, objectives, errors = {}, None, [], []
    complete = unsat = False
    recognized = 0
    for line in raw.stdout_text.splitlines():
        msg = _json_line(line)
        if msg is None or "type" not in msg:
            continue
        recognized += 1
        kind = msg["type"]
        if kind == "solution":
            out = msg.get("output", {})
            sol = out.get("json")
            if sol is None and isinstance(out.get("raw"), str):
                sol = json.loads(out["raw"])
            sol = dict(sol or {})
            obj = sol.pop("_objective", None)
            if obj is not None:
                objectives.append(obj)
                objective = obj
            assignments = {k: _norm_value(v) for k, v in sol.items() if not k.startswith("_")}
        elif kind == "status":
            st = msg.get("status")
            complete = complete or st in _COMPLETE
            unsat = unsat or st in _UNSAT
        elif kind == "error":
            errors.append(msg.get("message") or msg.get("what") or "error")
    if raw.stdout_text.strip() and not recognized:
        raise ValueError("unreadable MiniZinc output")
    return MznParsed(assignments, objective if is_opt else None, is_opt and complete, unsat, objectives, errors)


def run_model(cfg: MznConfig, text: str, flags, deadline_s: float) -> sandbox.ProcessResult:
    """Write `text` to a temporary .mzn file and run the executable on it."""
    with tempfile.TemporaryDirectory(prefix="mzn-model-") as d:
        path = os.path.join(d, "model.mzn")
        with open(path, "w") as fh:
            fh.write(text)
        spec = sandbox.ProcessSpec(argv=[cfg.executable_path, *flags, path], timeout_s=deadline_s)
        return sandbox.run_isolated(spec)


def _raw(r: sandbox.ProcessResult) -> MznRawResult:
    return MznRawResult(r.stdout_text, r.stderr_text, r.exit_code, r.timed_out)


class MiniZincBackend(Backend):
    mode = "minizinc"

    def __init__(self, cfg: MznConfig | None = None):
        self.cfg = cfg or MznConfig.discover()

    def validate(self, items):
        diags = item_diagnostics(items)
        if dg.has_errors(diags):
            return diags
        text = "\n".join(items)
        if not _SOLVE_ITEM.search(strip_comments(text)):
            last = max(1, text.count("\n") + 1)
            diags.append(dg.warning(last, "model has no solve item yet; add e.g. 'solve satisfy;' before solving"))
        return diags + mzn_validate(text, self.cfg)

    def solve(self, items, timeout_s: float) -> Solution:
        text = "\n".join(items)
        if not self.cfg.executable_path:
            return error_solution("MiniZinc executable not found (set --mzn-exe or MCP_SOLVER_MZN, or put minizinc on PATH)")
        return mzn_solve(text, timeout_s, self.cfg)


def mzn_validate(text: str, cfg: MznConfig) -> list[dg.Diagnostic]:
    if not cfg.executable_path:
        return [dg.error(1, "solver unavailable: no MiniZinc executable configured")]
    try:
        raw = _raw(run_model(cfg, text, ("--model-check-only", "--json-stream"), cfg.flatten_timeout_s))
    except sandbox.SpawnError as exc:
        return [dg.error(1, f"solver unavailable: {exc}")]
    if raw.timed_out:
        return [dg.error(1, f"model check did not finish within the flatten timeout of {cfg.flatten_timeout_s:g} s")]
    return parse_checker_output(raw, text.count("\n") + 1)


def mzn_solve(text: str, timeout_s: float, cfg: MznConfig) -> Solution:
    opt = is_optimization(text)
    limit_ms = max(100, int(timeout_s * 800))
    flags = (*SOLVE_FLAGS, "--solver", cfg.solver_tag, "--time-limit", str(limit_ms))
    try:
        result = run_model(cfg, text, flags, timeout_s + 0.5)
    except sandbox.SpawnError as exc:
        return error_solution(f"MiniZinc executable {cfg.executable_path} could not be started: {exc.reason}")
    wall = min(result.wall_time_s, timeout_s + 1.0)
    raw = _raw(result)
    return normalize(outcome_from_raw(raw, opt, timeout_s), wall, "minizinc")


def outcome_from_raw(raw: MznRawResult, opt: bool, timeout_s: float) -> BackendOutcome:
    try:
        p = mzn_parse_result(raw, opt)
    except (ValueError, TypeError, KeyError) as exc:
        return BackendOutcome("error", detail=f"{exc}; stderr: {raw.stderr_text[-300:].strip()}")
    if p.errors:
        return BackendOutcome("error", detail="; ".join(p.errors)[:500])
    if p.proven_unsat:
        return BackendOutcome("unsat")
    if p.assignments or p.objectives:
        values = dict(p.assignments)
        if opt:
            values["_optimal"] = p.proven_optimal
        return BackendOutcome("sat", values=values, objective=p.objective, is_optimization=opt,
                              proven_optimal=p.proven_optimal, timeout_s=timeout_s)
    if raw.timed_out or raw.exit_code == 0:
        # a clean exit with neither solution nor verdict means the time limit hit
        return BackendOutcome("timeout", timeout_s=timeout_s)
    return BackendOutcome("error", detail=f"exit code {raw.exit_code}: {raw.stderr_text[-300:].strip() or 'no output'}")
