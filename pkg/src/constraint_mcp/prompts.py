"""Static instruction prompts served through prompts/list and prompts/get."""

from __future__ import annotations

_COMMON = """\
You edit a constraint model one item at a time. Items are numbered from 1.

Workflow:
- Start with clear_model, then add_item for each piece of the model.
- Every edit is checked against the whole model. A rejected edit changes
  nothing; read the diagnostics (line, column, message) and send a fix.
- get_model shows the numbered items. Use replace_item to fix an item in
  place and delete_item to drop one.
- solve_model takes a timeout in seconds. The result has the fields status
  (sat, unsat, timeout or error), satisfiable, values, objective,
  solve_time, success and message.
- After solving, check the values against every requirement of the problem
  before you answer. If something is off, edit the model and solve again.
"""

_MODE_TEXT = {
    "minizinc": """\
Mode: MiniZinc.
- One item is one MiniZinc item ending in ';' (a declaration, a constraint,
  an include, the solve item, or an output item). Multi-line items are fine.
- Use `include "globals.mzn";` before using global constraints.
- The model needs exactly one solve item: `solve satisfy;`,
  `solve minimize <expr>;` or `solve maximize <expr>;`.
- For optimization, values._optimal tells whether optimality was proven.
Example items:
  var 1..9: x;
  constraint x * x > 20;
  solve minimize x;
""",
    "sat": """\
Mode: SAT (propositional).
Each line of an item is one statement:
  var a b c          declare boolean variables (before use)
  clause a -b c      at least one literal true; -name negates
  atmost k a b c     no more than k of the names true
  atleast k a b c    k or more of the names true
  exactly k a b c    exactly k of the names true
Lines starting with # are comments. Names match [A-Za-z_][A-Za-z0-9_]*.
Values come back as name -> true/false. There is no objective.
Example items:
  var q1 q2 q3
  exactly 1 q1 q2 q3
  clause -q1 -q2
""",
    "smt": """\
Mode: SMT (SMT-LIB2 subset).
- One item is one or more SMT-LIB2 commands. Allowed commands: set-logic,
  declare-const, declare-fun, define-fun, assert, check-sat, get-model,
  get-value, push, pop, echo. Anything else is rejected.
- Declare every symbol before using it, and only once.
- (check-sat) and (get-model) are appended automatically if missing.
- Values: booleans and integers as JSON scalars, reals as {num, den},
  bitvectors as {width, value}, arrays as {default, entries}. Zero-argument
  define-fun terms are evaluated and reported too.
Example items:
  (declare-const x Int)
  (assert (and (> x 2) (< x 5)))
""",
}


def prompt_name(mode: str) -> str:
    return f"{mode}-instructions"


def list_prompts(mode: str) -> list[dict]:
    return [{"name": prompt_name(mode), "description": f"How to build and solve models in {mode} mode"}]


def instruction_text(mode: str) -> str:
    return _COMMON + "\n" + _MODE_TEXT[mode]


def get_prompt(mode: str, name: str) -> dict | None:
    if name != prompt_name(mode):
        return None
    return {
        "description": f"Instructions for {mode} mode",
        "messages": [{"role": "user", "content": {"type": "text", "text": instruction_text(mode)}}],
    }
