"""The SAT item language.

One statement per line::

    var x y z            declare propositional variables
    clause x -y z        disjunction of literals (-name negates)
    atmost k x y z       at most k of the variables are true
    atleast k x y z      at least k are true
    exactly k x y z      exactly k are true

``#`` starts a comment. A name must be declared on an earlier line than any
use of it, and may be declared only once.
"""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass

from .. import diagnostics as dg
from ..model import item_line_offsets

KEYWORDS = ("var", "clause", "atmost", "atleast", "exactly")
CARDINALITY = ("atmost", "atleast", "exactly")
IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class SatItem:
    form: str  # var_decl | clause | atmost | atleast | exactly
    names: tuple[str, ...]
    negated: tuple[bool, ...] = ()  # clause only, parallel to names
    k: int = 0
    line: int = 1


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def _column(raw: str, token: str) -> int:
    return raw.find(token) + 1 if token in raw else 0


def parse_items(items) -> tuple[list[SatItem], list[dg.Diagnostic]]:
    """Parse and name-check a whole model. Line numbers refer to the
    newline-joined item texts."""
    out: list[SatItem] = []
    diags: list[dg.Diagnostic] = []
    declared: dict[str, int] = {}

    for idx, (text, first_line) in enumerate(zip(items, item_line_offsets(items)), 1):
        n_statements = 0
        for offset, raw in enumerate(text.split("\n")):
            line = first_line + offset
            toks = _strip_comment(raw).split()
            if not toks:
                continue
            n_statements += 1
            kw, args = toks[0], toks[1:]
            if kw not in KEYWORDS:
                close = difflib.get_close_matches(kw, KEYWORDS, n=1)
                hint = f"did you mean '{close[0]}'? " if close else ""
                diags.append(dg.error(line, f"unknown keyword '{kw}' in item {idx}", _column(raw, kw),
                                      suggestion=hint + "statements start with one of: " + ", ".join(KEYWORDS)))
                continue
            if kw == "var":
                diags.extend(_parse_var(args, raw, line, declared, out))
            elif kw == "clause":
                diags.extend(_parse_clause(args, raw, line, declared, out))
            else:
                diags.extend(_parse_card(kw, args, raw, line, declared, out))
        if n_statements == 0:
            diags.append(dg.warning(first_line, f"item {idx} contains no statements"))
    return out, diags


def _bad_ident(name, raw, line):
    return dg.error(line, f"invalid identifier '{name}'", _column(raw, name),
                    suggestion="identifiers match [A-Za-z_][A-Za-z0-9_]*")


def _parse_var(args, raw, line, declared, out):
    diags = []
    if not args:
        return [dg.error(line, "'var' needs at least one name", suggestion="e.g. var x y z")]
    names = []
    for name in args:
        if not IDENT.match(name) or name in KEYWORDS:
            diags.append(_bad_ident(name, raw, line))
        elif name in declared or name in names:
            first = declared.get(name, line)
            diags.append(dg.error(line, f"duplicate declaration of '{name}' (first declared on line {first})",
                                  _column(raw, name), suggestion="declare each variable once; reuse the existing name"))
        else:
            names.append(name)
    if not diags:
        for name in names:
            declared[name] = line
        out.append(SatItem("var_decl", tuple(names), line=line))
    return diags


def _check_use(name, raw, line, declared):
    if not IDENT.match(name):
        return _bad_ident(name, raw, line)
    if name not in declared:
        return dg.error(line, f"undeclared variable {name}", _column(raw, name),
                        suggestion=f"add 'var {name}' in an earlier item")
    return None


def _parse_clause(args, raw, line, declared, out):
    if not args:
        return [dg.error(line, "'clause' needs at least one literal")]
    diags, names, neg = [], [], []
    for lit in args:
        is_neg = lit.startswith("-")
        name = lit[1:] if is_neg else lit
        d = _check_use(name, raw, line, declared)
        if d:
            diags.append(d)
        names.append(name)
        neg.append(is_neg)
    if not diags:
        out.append(SatItem("clause", tuple(names), tuple(neg), line=line))
    return diags


def _parse_card(kw, args, raw, line, declared, out):
    if not args:
        return [dg.error(line, f"'{kw}' needs a bound and variables", suggestion=f"e.g. {kw} 1 x y z")]
    k_tok, names = args[0], args[1:]
    try:
        k = int(k_tok)
    except ValueError:
        return [dg.error(line, f"bound of '{kw}' must be an integer, got '{k_tok}'", _column(raw, k_tok))]
    if not names:
        return [dg.error(line, f"'{kw}' needs at least one variable")]
    diags = []
    for name in names:
        if name.startswith("-"):
            diags.append(dg.error(line, f"negated literal '{name}' not allowed in '{kw}'", _column(raw, name)))
            continue
        d = _check_use(name, raw, line, declared)
        if d:
            diags.append(d)
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        diags.append(dg.error(line, f"variable(s) listed twice in '{kw}': {', '.join(dupes)}"))
    if not 0 <= k <= len(names):
        diags.append(dg.error(line, f"bound k={k} out of range 0..{len(names)} for '{kw}'", _column(raw, k_tok)))
    if not diags:
        out.append(SatItem(kw, tuple(names), k=k, line=line))
    return diags
