"""Compilation of SAT items to CNF.

Cardinality constraints use the sequential counter: register ``s[i][j]``
means "at least j+1 of the first i+1 literals are true", with one register
row per input literal (|S|*k auxiliaries).
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CnfFormula:
    num_base_vars: int
    num_aux_vars: int = 0
    clauses: list[list[int]] = field(default_factory=list)
    name_map: dict[str, int] = field(default_factory=dict)

    @property
    def num_vars(self) -> int:
        return self.num_base_vars + self.num_aux_vars


class _Allocator:
    def __init__(self, first: int):
        self.next = first
        self.count = 0

    def __call__(self) -> int:
        v = self.next
        self.next += 1
        self.count += 1
        return v


def atmost_clauses(lits, k, new_var) -> list[list[int]]:
    n = len(lits)
    if k >= n:
        return []
    if k == 0:
        return [[-x] for x in lits]
    s = [[new_var() for _ in range(k)] for _ in range(n)]
    clauses = []
    for i, x in enumerate(lits):
        clauses.append([-x, s[i][0]])
        if i == 0:
            clauses.extend([-s[0][j]] for j in range(1, k))
            continue
        for j in range(k):
            clauses.append([-s[i - 1][j], s[i][j]])
        for j in range(1, k):
            clauses.append([-x, -s[i - 1][j - 1], s[i][j]])
        clauses.append([-x, -s[i - 1][k - 1]])
    return clauses


def atleast_clauses(lits, k, new_var) -> list[list[int]]:
    # at least k of S  <=>  at most |S|-k of the negations
    return atmost_clauses([-x for x in lits], len(lits) - k, new_var)


def compile_items(items) -> CnfFormula:
    """Deterministic: same items give identical clause order and aux ids."""
    name_map: dict[str, int] = {}
    for it in items:
        if it.form == "var_decl":
            for name in it.names:
                name_map[name] = len(name_map) + 1
    alloc = _Allocator(len(name_map) + 1)
    clauses: list[list[int]] = []
    for it in items:
        if it.form == "var_decl":
            continue
        if it.form == "clause":
            clauses.append([-name_map[n] if neg else name_map[n] for n, neg in zip(it.names, it.negated)])
            continue
        lits = [name_map[n] for n in it.names]
        if it.form in ("atmost", "exactly"):
            clauses.extend(atmost_clauses(lits, it.k, alloc))
        if it.form in ("atleast", "exactly"):
            clauses.extend(atleast_clauses(lits, it.k, alloc))
    return CnfFormula(len(name_map), alloc.count, clauses, name_map)


def to_dimacs(cnf: CnfFormula) -> str:
    lines = [f"c {name} = {v}" for name, v in cnf.name_map.items()]
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    lines.extend(" ".join(map(str, c)) + " 0" for c in cnf.clauses)
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> CnfFormula:
    """Reads the format written by to_dimacs (name comments optional)."""
    name_map: dict[str, int] = {}
    nvars = None
    clauses: list[list[int]] = []
    cur: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line[1:].split("=")
            if len(parts) == 2 and parts[1].strip().isdigit():
                name_map[parts[0].strip()] = int(parts[1])
            continue
        if line.startswith("p"):
            _, fmt, v, _c = line.split()
            if fmt != "cnf":
                raise ValueError(f"unsupported DIMACS format {fmt!r}")
            nvars = int(v)
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(cur)
    if nvars is None:
        raise ValueError("missing 'p cnf' header")
    base = len(name_map)
    return CnfFormula(base, nvars - base, clauses, name_map)


def decode(assignment: dict[int, bool], cnf: CnfFormula) -> dict[str, bool]:
    """Project a total assignment onto the named variables."""
    return {name: bool(assignment[v]) for name, v in cnf.name_map.items()}
