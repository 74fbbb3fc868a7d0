"""SMT-LIB2 items: parsing to whitelisted commands, validation, solving
through an external SMT-LIB2 solver process."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .. import diagnostics as dg
from .. import sandbox
from ..solution import BackendOutcome, Solution, error_solution, normalize
from .base import Backend, discover_executable
from .sexpr import SExpr, SExprError, atom, is_symbol, lst, parse_all, symbol_name, to_text
from .smt_values import Evaluator, NotGround, parse_model, to_json

WHITELIST = (
    "set-logic", "declare-const", "declare-fun", "define-fun", "assert",
    "check-sat", "get-model", "get-value", "push", "pop", "echo",
)
DECLARING = ("declare-const", "declare-fun", "define-fun")
_ARITY = {  # allowed total lengths of each command form
    "set-logic": (2,), "declare-const": (3,), "declare-fun": (4,), "define-fun": (5,),
    "assert": (2,), "check-sat": (1,), "get-model": (1,), "get-value": (2,),
    "push": (1, 2), "pop": (1, 2), "echo": (2,),
}

BUILTINS = frozenset("""
true false not and or xor => = distinct ite
+ - * / div mod abs < <= > >= to_real to_int is_int
select store
bvnot bvneg bvand bvor bvxor bvnand bvnor bvxnor bvcomp bvadd bvsub bvmul
bvudiv bvurem bvsdiv bvsrem bvsmod bvshl bvlshr bvashr
bvult bvule bvugt bvuge bvslt bvsle bvsgt bvsge concat
""".split())
BINDERS = ("let", "forall", "exists")


@dataclass
class SmtCommand:
    head: str
    body: SExpr

    @property
    def line(self) -> int:
        return self.body.span.line if self.body.span else 1

    @property
    def column(self) -> int:
        return self.body.span.column if self.body.span else 0

    def declared_name(self) -> str | None:
        if self.head in DECLARING and len(self.body) > 1 and self.body[1].is_atom:
            return symbol_name(self.body[1].atom)
        return None


def smt_parse(text: str) -> tuple[list[SmtCommand], list[dg.Diagnostic]]:
    try:
        forms = parse_all(text)
    except SExprError as exc:
        return [], [dg.error(exc.line, exc.message, exc.column)]
    cmds, diags = [], []
    for f in forms:
        line, col = f.span.line, f.span.column
        if f.is_atom or not f.children or not f[0].is_atom:
            diags.append(dg.error(line, f"expected a command like (assert ...), got {to_text(f)[:40]}", col))
            continue
        head = f.head
        if head not in WHITELIST:
            diags.append(dg.error(line, f"command not permitted: {head}", col,
                                  suggestion="allowed commands: " + " ".join(WHITELIST)))
            continue
        if len(f) not in _ARITY[head]:
            diags.append(dg.error(line, f"malformed ({head} ...): wrong number of arguments", col))
            continue
        cmds.append(SmtCommand(head, f))
    return cmds, diags


def _bound_names(binder: str, spec: SExpr) -> list[str]:
    out = []
    for b in spec.children or []:
        if b.children and b[0].is_atom:
            out.append(symbol_name(b[0].atom))
    return out


def _undeclared(term: SExpr, known, bound: frozenset, found: list):
    """Collect (symbol, span) for free symbols of `term` not in `known`."""
    if term.is_atom:
        tok = term.atom
        if not is_symbol(tok):
            return
        name = symbol_name(tok)
        if name in bound or name in known or tok in BUILTINS:
            return
        found.append((name, term.span))
        return
    if not term.children:
        return
    head = term[0]
    if head.is_atom:
        h = head.atom
        if h in ("_", "as"):
            return  # indexed identifiers and sort ascriptions
        if h == "let" and len(term) == 3:
            for b in term[1].children or []:
                if len(b) == 2:
                    _undeclared(b[1], known, bound, found)
            _undeclared(term[2], known, bound | set(_bound_names(h, term[1])), found)
            return
        if h in ("forall", "exists") and len(term) == 3:
            _undeclared(term[2], known, bound | set(_bound_names(h, term[1])), found)
            return
        if h == "!":
            _undeclared(term[1], known, bound, found)
            return
        _undeclared(head, known, bound, found)
    else:
        _undeclared(head, known, bound, found)
    for child in term.children[1:]:
        _undeclared(child, known, bound, found)


def _named_annotations(term: SExpr, out: list):
    if term.is_atom or not term.children:
        return
    if term.head == "!":
        kids = term.children
        for i, k in enumerate(kids):
            if k.is_atom and k.atom == ":named" and i + 1 < len(kids):
                out.append(symbol_name(kids[i + 1].atom))
    for c in term.children:
        _named_annotations(c, out)


def smt_validate(commands: list[SmtCommand]) -> list[dg.Diagnostic]:
    diags = []
    scopes: list[dict[str, int]] = [{}]

    def known():
        merged = {}
        for s in scopes:
            merged.update(s)
        return merged

    def check_terms(cmd, terms, bound=frozenset()):
        found = []
        k = known()
        for t in terms:
            _undeclared(t, k, bound, found)
        for name, span in found:
            diags.append(dg.error(span.line if span else cmd.line, f"undeclared symbol {name}",
                                  span.column if span else 0,
                                  suggestion=f"declare it first, e.g. (declare-const {name} Int)"))

    saw_check = saw_model = False
    for cmd in commands:
        b = cmd.body
        if cmd.head in DECLARING:
            if not b[1].is_atom or not is_symbol(b[1].atom):
                diags.append(dg.error(cmd.line, f"({cmd.head} ...) needs a symbol name", cmd.column))
                continue
            name = symbol_name(b[1].atom)
            if cmd.head == "define-fun":
                params = _bound_names("define-fun", b[2])
                check_terms(cmd, [b[4]], frozenset(params))
            prev = known().get(name)
            if prev is not None or name in BUILTINS:
                where = f" (first declared on line {prev})" if prev else " (reserved name)"
                diags.append(dg.error(cmd.line, f"duplicate declaration of {name}{where}", cmd.column,
                                      suggestion="declare each symbol once; use a new name or replace the earlier item"))
                continue
            scopes[-1][name] = cmd.line
        elif cmd.head == "assert":
            check_terms(cmd, [b[1]])
            named = []
            _named_annotations(b[1], named)
            for n in named:
                scopes[-1].setdefault(n, cmd.line)
        elif cmd.head == "get-value":
            check_terms(cmd, b[1].children or [])
        elif cmd.head == "push":
            for _ in range(_level_arg(b)):
                scopes.append({})
        elif cmd.head == "pop":
            n = _level_arg(b)
            if n >= len(scopes):
                diags.append(dg.error(cmd.line, "pop without matching push", cmd.column))
            else:
                del scopes[len(scopes) - n:]
        elif cmd.head == "check-sat":
            saw_check = True
        elif cmd.head == "get-model":
            saw_model = True

    if commands and not (saw_check and saw_model):
        missing = [c for c, seen in (("(check-sat)", saw_check), ("(get-model)", saw_model)) if not seen]
        last = commands[-1]
        end_line = last.body.span.end_line if last.body.span else 1
        diags.append(dg.warning(end_line, f"no {' / '.join(missing)}: will be auto-appended at solve time"))
    return diags


def _level_arg(body: SExpr) -> int:
    if len(body) == 2 and body[1].is_atom and body[1].atom.isdigit():
        return int(body[1].atom)
    return 1


def serialize(commands: list[SmtCommand]) -> str:
    """Script sent to the solver: the parsed commands, plus check-sat and
    get-model when the model does not already end with them."""
    forms = [c.body for c in commands]
    last_check = max((i for i, c in enumerate(commands) if c.head == "check-sat"), default=None)
    if last_check is None:
        forms.append(lst("check-sat"))
        last_check = len(forms) - 1
    if not any(c.head == "get-model" for c in commands[last_check + 1:] if last_check < len(commands)):
        forms.append(lst("get-model"))
    return "\n".join(to_text(f) for f in forms) + "\n"


# --- solver process ----------------------------------------------------------

@dataclass
class SmtConfig:
    executable: str | None = None  # resolved path, or None if not found
    args: tuple[str, ...] = ("-smt2", "-in")
    timeout_option: str = "-T:{seconds}"
    deep_check: bool = True  # run the solver on edits to surface sort errors
    check_timeout_s: float = 5.0

    @classmethod
    def discover(cls, explicit: str | None = None, **kw) -> "SmtConfig":
        return cls(executable=discover_executable(explicit, "MCP_SOLVER_SMT", ("z3",)), **kw)

    def timeout_arg(self, timeout_s: float) -> str:
        seconds = max(1, math.floor(timeout_s * 0.9))
        return self.timeout_option.format(seconds=seconds, ms=max(1, int(timeout_s * 1000) - 100))


_ERROR_POS = re.compile(r"line (\d+) column (\d+):\s*(.*)", re.S)


def _solver_errors(outputs: list[SExpr]) -> list[tuple[int | None, int, str]]:
    errs = []
    for o in outputs:
        if o.head == "error" and len(o) >= 2 and o[1].is_atom:
            msg = o[1].atom.strip('"').replace('""', '"')
            m = _ERROR_POS.match(msg)
            if m:
                errs.append((int(m.group(1)), int(m.group(2)), m.group(3)))
            else:
                errs.append((None, 0, msg))
    return errs


def _blank_commands(text: str, commands: list[SmtCommand], heads) -> str:
    """Overwrite selected commands with spaces so line/column stay put."""
    lines = text.split("\n")
    for c in commands:
        if c.head not in heads or not c.body.span:
            continue
        s = c.body.span
        for ln in range(s.line, s.end_line + 1):
            row = lines[ln - 1]
            a = s.column - 1 if ln == s.line else 0
            b = s.end_column if ln == s.end_line else len(row)
            lines[ln - 1] = row[:a] + " " * (b - a) + row[b:]
    return "\n".join(lines)


class SmtBackend(Backend):
    mode = "smt"

    def __init__(self, cfg: SmtConfig | None = None):
        self.cfg = cfg or SmtConfig.discover()

    def validate(self, items):
        from ..model import concat_model

        text = concat_model(items)
        cmds, diags = smt_parse(text)
        if dg.has_errors(diags):
            return diags
        diags = smt_validate(cmds)
        if dg.has_errors(diags) or not (self.cfg.deep_check and self.cfg.executable):
            return diags
        return diags + self._solver_check(text, cmds)

    def _solver_check(self, text, cmds) -> list[dg.Diagnostic]:
        script = _blank_commands(text, cmds, ("check-sat", "get-model", "get-value", "echo"))
        spec = sandbox.ProcessSpec(argv=[self.cfg.executable, *self.cfg.args], timeout_s=self.cfg.check_timeout_s,
                                   stdin_text=script + "\n")
        try:
            raw = sandbox.run_isolated(spec)
        except sandbox.SpawnError as exc:
            return [dg.error(1, f"solver unavailable: {exc}")]
        if raw.timed_out:
            return [dg.warning(1, "solver-side check timed out; deeper type errors not verified")]
        try:
            outputs = parse_all(raw.stdout_text)
        except SExprError:
            return [dg.warning(1, "could not read solver-side check output")]
        return [dg.error(line or 1, msg, col) for line, col, msg in _solver_errors(outputs)]

    def solve(self, items, timeout_s: float) -> Solution:
        from ..model import concat_model

        cmds, diags = smt_parse(concat_model(items))
        if dg.has_errors(diags) or dg.has_errors(smt_validate(cmds)):
            return error_solution("model does not validate; fix it before solving")
        if not self.cfg.executable:
            return error_solution("SMT solver executable not found (set --smt-exe or MCP_SOLVER_SMT, or put z3 on PATH)")
        script = serialize(cmds)
        spec = sandbox.ProcessSpec(
            argv=[self.cfg.executable, *self.cfg.args, self.cfg.timeout_arg(timeout_s)],
            timeout_s=timeout_s + 0.5,
            stdin_text=script,
        )
        try:
            raw = sandbox.run_isolated(spec)
        except sandbox.SpawnError as exc:
            return error_solution(f"SMT solver {self.cfg.executable} could not be started: {exc.reason}")
        wall = min(raw.wall_time_s, timeout_s + 1.0)
        outcome = interpret_output(raw, timeout_s, cmds)
        return normalize(outcome, wall, self.mode)


def interpret_output(raw: sandbox.ProcessResult, timeout_s: float, cmds: list[SmtCommand]) -> BackendOutcome:
    if raw.timed_out:
        return BackendOutcome("timeout", timeout_s=timeout_s)
    try:
        outputs = parse_all(raw.stdout_text)
    except SExprError as exc:
        return BackendOutcome("error", detail=f"unreadable solver output ({exc}); stderr: {raw.stderr_text[-300:].strip()}")
    verdict, verdict_pos = None, -1
    for i, o in enumerate(outputs):
        if o.is_atom and o.atom in ("sat", "unsat", "unknown", "timeout"):
            verdict, verdict_pos = o.atom, i
    errors = [e for e in _solver_errors(outputs) if not (verdict in ("unsat", "unknown", "timeout") and "model" in e[2])]
    if errors:
        line, _, msg = errors[0]
        where = f" (line {line})" if line else ""
        return BackendOutcome("error", detail=f"solver error{where}: {msg}")
    if verdict is None:
        excerpt = (raw.stderr_text or raw.stdout_text)[-300:].strip()
        return BackendOutcome("error", detail=f"no verdict from solver (exit code {raw.exit_code}): {excerpt}")
    if verdict == "unsat":
        return BackendOutcome("unsat")
    if verdict in ("unknown", "timeout"):
        if verdict == "timeout" or raw.wall_time_s >= 0.9 * timeout_s:
            return BackendOutcome("timeout", timeout_s=timeout_s)
        return BackendOutcome("error", detail="solver returned unknown")
    model_block = next((o for o in outputs[verdict_pos + 1:] if not o.is_atom), None)
    values = extract_values(model_block, cmds) if model_block is not None else {}
    return BackendOutcome("sat", values={k: to_json(v) for k, v in values.items()})


def extract_values(model_block: SExpr, cmds: list[SmtCommand]) -> dict:
    """Declared constants from the model, plus user-defined zero-ary
    functions evaluated under that model where possible."""
    raw_values, _problems = parse_model(model_block)
    declared = [c.declared_name() for c in cmds if c.head in ("declare-const", "declare-fun") and c.declared_name()]
    defined = {c.declared_name(): c for c in cmds if c.head == "define-fun"}
    values = {n: raw_values[n] for n in declared if n in raw_values}
    ev = Evaluator(values, user_functions(cmds))
    for name, c in defined.items():
        if len(c.body[2]) == 0:
            try:
                values[name] = ev.eval(c.body[4])
            except (NotGround, ValueError, TypeError, AttributeError, IndexError, KeyError):
                pass
    return values


def user_functions(cmds: list[SmtCommand]) -> dict:
    return {c.declared_name(): (_bound_names("define-fun", c.body[2]), c.body[4])
            for c in cmds if c.head == "define-fun"}


def check_witness(cmds: list[SmtCommand], values: dict) -> list[tuple[str, bool | None]]:
    """Evaluate every assertion under `values` (name -> SMT value).

    Returns (assertion text, truth) pairs; truth is None for terms outside
    the evaluator's ground fragment.
    """
    ev = Evaluator(values, user_functions(cmds))
    out = []
    for c in cmds:
        if c.head != "assert":
            continue
        try:
            out.append((to_text(c.body), bool(ev.eval(c.body[1]))))
        except NotGround:
            out.append((to_text(c.body), None))
    return out


def commands_text(cmds: list[SmtCommand]) -> str:
    return "\n".join(to_text(c.body) for c in cmds)


__all__ = [
    "SmtBackend", "SmtCommand", "SmtConfig", "WHITELIST", "atom", "check_witness", "extract_values",
    "interpret_output", "serialize", "smt_parse", "smt_parse_model", "smt_validate",
]


def smt_parse_model(block: SExpr) -> tuple[dict, list[str]]:
    """name -> SMT value for the zero-ary entries of a get-model block, plus
    a note for each entry whose value shape was not understood."""
    return parse_model(block)
