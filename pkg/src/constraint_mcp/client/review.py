"""The reviewer: an isolated LLM call that sees only the problem, the model
and the solution, and answers CORRECT, INCORRECT or UNKNOWN."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

VERDICTS = ("correct", "incorrect", "unknown")
_VERDICT = re.compile(r"^\s*(CORRECT|INCORRECT|UNKNOWN)\s*:\s*(.*)\Z", re.I | re.S)

REVIEWER_SYSTEM = """\
You review a solution produced by a constraint solver for a problem stated in natural language.
You get three things: the problem statement, the model that was solved, and the solver's solution.
We do not check optimality; judge only whether the answer is right with respect to the constraints.
Begin your reply with exactly one of CORRECT:, INCORRECT: or UNKNOWN: followed by a short explanation.
Use UNKNOWN when you cannot confirm or refute the solution."""

_SAT_QUESTION = ("Check whether the assignment in the solution satisfies all the constraints from the "
                 "problem statement.")
_UNSAT_QUESTION = ("The solver reports that no solution exists. Check whether all constraints in the "
                   "encoding are indeed present in the problem statement, so that unsatisfiability is genuine.")


@dataclass
class ReviewVerdict:
    verdict: str
    explanation: str
    token_usage: dict = field(default_factory=lambda: {"input": 0, "output": 0})
    connector_called: bool = False

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"bad verdict {self.verdict!r}")
        if not self.explanation.strip():
            self.explanation = "no explanation given"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "explanation": self.explanation}


def build_review_conversation(problem_text: str, model_text: str, solution: dict) -> list[dict]:
    question = _SAT_QUESTION if solution.get("status") == "sat" else _UNSAT_QUESTION
    user = (
        f"PROBLEM:\n{problem_text}\n\n"
        f"MODEL:\n{model_text}\n\n"
        f"SOLUTION:\n{json.dumps(solution, indent=1)}\n\n"
        f"{question}"
    )
    return [{"role": "system", "content": REVIEWER_SYSTEM}, {"role": "user", "content": user}]


def parse_verdict(text) -> ReviewVerdict:
    m = _VERDICT.match(text) if isinstance(text, str) else None
    if not m:
        excerpt = str(text)[:80].replace("\n", " ")
        return ReviewVerdict("unknown", f"could not parse reviewer reply: {excerpt!r}")
    return ReviewVerdict(m.group(1).lower(), m.group(2).strip())


def review(problem_text: str, model_text: str, solution: dict | None, connector) -> ReviewVerdict:
    status = (solution or {}).get("status")
    if status not in ("sat", "unsat"):
        why = {"timeout": "the solver timed out", "error": "the solver reported an error"}.get(status, "no solution")
        return ReviewVerdict("unknown", f"{why}; nothing to review")
    conversation = build_review_conversation(problem_text, model_text, solution)
    try:
        reply = connector.send(conversation, [])
    except Exception:  # any connector failure degrades to unknown
        return ReviewVerdict("unknown", "reviewer unavailable", connector_called=True)
    v = parse_verdict(reply.assistant_text)
    v.token_usage = dict(reply.token_usage)
    v.connector_called = True
    return v
