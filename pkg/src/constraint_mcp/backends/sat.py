from __future__ import annotations

import os
import sys
from pathlib import Path

from .. import sandbox
from ..solution import BackendOutcome, Solution, error_solution, normalize
from .base import Backend
from .cnf import CnfFormula, compile_items, decode, to_dimacs
from .sat_items import parse_items

_SRC_ROOT = str(Path(__file__).resolve().parents[2])


def embedded_solver_argv() -> list[str]:
    return [sys.executable, "-m", "constraint_mcp.backends.sat_worker"]


def parse_competition_output(text: str, cnf: CnfFormula) -> tuple[str, dict[int, bool] | None]:
    """Parse ``s``/``v`` lines into (status, total assignment)."""
    status = None
    lits: list[int] = []
    for line in text.splitlines():
        if line.startswith("s "):
            status = line[2:].strip()
        elif line.startswith("v "):
            lits.extend(int(t) for t in line[2:].split())
    if status == "SATISFIABLE":
        assignment = {v: False for v in range(1, cnf.num_vars + 1)}
        for lit in lits:
            if lit:
                assignment[abs(lit)] = lit > 0
        return "sat", assignment
    if status == "UNSATISFIABLE":
        return "unsat", None
    if status == "UNKNOWN":
        return "unknown", None
    raise ValueError("no 's' status line in solver output")


class SatBackend(Backend):
    mode = "sat"

    def __init__(self, solver_argv: list[str] | None = None, max_timeout_s: float = 30.0):
        self.solver_argv = solver_argv or embedded_solver_argv()
        self.max_timeout_s = max_timeout_s

    def validate(self, items):
        _, diags = parse_items(items)
        return diags

    def compile(self, items) -> CnfFormula:
        parsed, diags = parse_items(items)
        errors = [d for d in diags if d.is_error]
        if errors:
            raise ValueError(f"model does not parse: {errors[0]}")
        return compile_items(parsed)

    def solve(self, items, timeout_s: float) -> Solution:
        try:
            cnf = self.compile(items)
        except ValueError as exc:
            return error_solution(str(exc))
        spec = sandbox.ProcessSpec(
            argv=[*self.solver_argv, "--timeout", f"{timeout_s:g}"],
            timeout_s=timeout_s + 0.4,
            stdin_text=to_dimacs(cnf),
            env_allowlist=("PATH", "HOME", "LANG"),
            extra_env={"PYTHONPATH": os.pathsep.join(filter(None, [_SRC_ROOT, os.environ.get("PYTHONPATH")]))},
        )
        try:
            raw = sandbox.run_isolated(spec)
        except sandbox.SpawnError as exc:
            return error_solution(f"SAT solver unavailable: {exc}")
        wall = min(raw.wall_time_s, timeout_s + 1.0)
        if raw.timed_out:
            return normalize(BackendOutcome("timeout", timeout_s=timeout_s), wall, self.mode)
        try:
            status, assignment = parse_competition_output(raw.stdout_text, cnf)
        except ValueError as exc:
            detail = f"{exc}; exit code {raw.exit_code}; stderr: {raw.stderr_text[-500:].strip()}"
            return normalize(BackendOutcome("error", detail=detail), wall, self.mode)
        if status == "sat":
            return normalize(BackendOutcome("sat", values=decode(assignment, cnf)), wall, self.mode)
        if status == "unsat":
            return normalize(BackendOutcome("unsat"), wall, self.mode)
        return normalize(BackendOutcome("timeout", timeout_s=timeout_s), wall, self.mode)
