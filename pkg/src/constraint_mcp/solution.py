"""The normalized solve result shared by all backends, and error tiers.

Backends report a :class:`BackendOutcome`; :func:`normalize` turns it into a
:class:`Solution`, whose constructor is the single place the status and
satisfiability coupling is enforced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

STATUSES = ("sat", "unsat", "timeout", "error")
SOLUTION_FIELDS = ("status", "satisfiable", "values", "objective", "solve_time", "success", "message")


class SolutionInvariantError(ValueError):
    pass


@dataclass
class Solution:
    status: str
    satisfiable: bool
    values: dict[str, Any]
    objective: float | int | None
    solve_time: float
    success: bool
    message: str

    def __post_init__(self):
        check_solution(self)

    def to_dict(self) -> dict[str, Any]:
        return {name: getattr(self, name) for name in SOLUTION_FIELDS}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Solution":
        missing = [f for f in SOLUTION_FIELDS if f not in d]
        if missing:
            raise SolutionInvariantError(f"solution missing fields {missing}")
        return cls(**{f: d[f] for f in SOLUTION_FIELDS})


def check_solution(s: Solution) -> None:
    if s.status not in STATUSES:
        raise SolutionInvariantError(f"unknown status {s.status!r}")
    if (s.status == "sat") != bool(s.satisfiable):
        raise SolutionInvariantError(f"status {s.status!r} with satisfiable={s.satisfiable}")
    if not s.success and s.status != "error":
        raise SolutionInvariantError("success=false requires status 'error'")
    if s.status == "error" and s.success:
        raise SolutionInvariantError("status 'error' must have success=false")
    if not (isinstance(s.solve_time, (int, float)) and s.solve_time >= 0 and math.isfinite(s.solve_time)):
        raise SolutionInvariantError(f"bad solve_time {s.solve_time!r}")
    if not isinstance(s.values, dict):
        raise SolutionInvariantError("values must be a mapping")
    if not isinstance(s.message, str) or not s.message:
        raise SolutionInvariantError("message must be a non-empty string")


@dataclass
class BackendOutcome:
    """What a backend learned from one solver run, before normalization."""

    status: str  # sat | unsat | timeout | error
    values: dict[str, Any] = field(default_factory=dict)
    objective: float | int | None = None
    is_optimization: bool = False
    proven_optimal: bool = False
    timeout_s: float | None = None
    detail: str = ""  # stderr excerpt or solver remark


def _summary(o: BackendOutcome, mode: str) -> str:
    if o.status == "sat":
        if o.is_optimization and o.objective is not None:
            if o.proven_optimal:
                return f"Optimal solution found with objective {o.objective} (optimality proven by the solver)."
            return f"Solution found with objective {o.objective}; optimality not proven within the time limit."
        return "Satisfying assignment found."
    if o.status == "unsat":
        return "The model is unsatisfiable."
    if o.status == "timeout":
        limit = f" of {o.timeout_s:g} s" if o.timeout_s is not None else ""
        return f"No solution found within the time limit{limit}."
    return f"Solver error in {mode} mode: {o.detail or 'unknown failure'}"


def normalize(outcome: BackendOutcome, solve_time_s: float, mode: str) -> Solution:
    """Build the seven-field Solution from a backend outcome. Never raises."""
    status = outcome.status if outcome.status in STATUSES else "error"
    if status != outcome.status:
        outcome = BackendOutcome("error", detail=f"backend produced unknown status {outcome.status!r}")
    values = dict(outcome.values) if status == "sat" else {}
    objective = outcome.objective if (status == "sat" and outcome.is_optimization) else None
    try:
        solve_time = max(0.0, float(solve_time_s))
        if not math.isfinite(solve_time):
            solve_time = 0.0
    except (TypeError, ValueError):
        solve_time = 0.0
    return Solution(
        status=status,
        satisfiable=status == "sat",
        values=values,
        objective=objective,
        solve_time=round(solve_time, 6),
        success=status != "error",
        message=_summary(outcome, mode),
    )


def error_solution(message: str, solve_time_s: float = 0.0) -> Solution:
    return Solution("error", False, {}, None, max(0.0, solve_time_s), False, message or "solver error")


# --- error containment -------------------------------------------------------

TIER_BY_ORIGIN = {
    "edit_validation": "validation",
    "solver_run": "execution",
    "transport": "protocol",
}


@dataclass
class ErrorTier:
    tier: str  # validation | execution | protocol
    detail: Any  # diagnostics list for validation, message otherwise

    @property
    def channel(self) -> str:
        return {"validation": "rejected_edit", "execution": "error_solution", "protocol": "jsonrpc_error"}[self.tier]


def classify_error(origin: str, payload) -> ErrorTier:
    try:
        tier = TIER_BY_ORIGIN[origin]
    except KeyError:
        raise ValueError(f"unknown error origin {origin!r}") from None
    return ErrorTier(tier, payload)
