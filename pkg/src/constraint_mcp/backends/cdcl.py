"""A small, complete CDCL SAT solver.

Two watched literals for unit propagation, first-UIP conflict analysis with
non-chronological backjumping, Luby restarts. Branching is static: the
variable occurring in the most clauses goes first, ties by lowest id.
With ``learning=False`` the solver degrades to plain chronological DPLL,
which is what the learned-clause soundness checks compare against.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

RESTART_UNIT = 100


@dataclass
class SatResult:
    result: str  # sat | unsat | timeout
    assignment: dict[int, bool] | None
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0


def luby(i: int) -> int:
    """i-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1
    return 1 << (k - 1)


class _Timeout(Exception):
    pass


class Solver:
    def __init__(self, num_vars: int, clauses, learning: bool = True):
        self.n = num_vars
        self.learning = learning
        self.value = [0] * (num_vars + 1)  # 0 unassigned, 1 true, -1 false
        self.level = [0] * (num_vars + 1)
        self.reason: list[list[int] | None] = [None] * (num_vars + 1)
        self.phase = [False] * (num_vars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: dict[int, list[list[int]]] = {}
        for v in range(1, num_vars + 1):
            self.watches[v] = []
            self.watches[-v] = []
        self.original: list[list[int]] = []
        self.learned: list[list[int]] = []
        self.flipped: list[bool] = []  # per decision level, DPLL mode only
        self.ok = True
        self.decisions = self.propagations = self.conflicts = 0

        counts = [0] * (num_vars + 1)
        for c in clauses:
            for lit in c:
                if lit == 0 or abs(lit) > num_vars:
                    raise ValueError(f"literal {lit} out of range 1..{num_vars}")
                counts[abs(lit)] += 1
        self.order = sorted(range(1, num_vars + 1), key=lambda v: (-counts[v], v))
        for c in clauses:
            self._add_original(list(c))

    # -- clause database ---------------------------------------------------

    def _lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def _add_original(self, c: list[int]) -> None:
        if not self.ok:
            return
        c = list(dict.fromkeys(c))
        if any(-lit in c for lit in c):
            return  # tautology
        self.original.append(c)
        if not c:
            self.ok = False
        elif len(c) == 1:
            val = self._lit_value(c[0])
            if val == -1:
                self.ok = False
            elif val == 0:
                self._enqueue(c[0], None)
        else:
            self.watches[c[0]].append(c)
            self.watches[c[1]].append(c)

    def _enqueue(self, lit: int, reason) -> None:
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    # -- propagation -------------------------------------------------------

    def _propagate(self):
        """Returns a conflicting clause or None."""
        value = self.value
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -p
            ws = self.watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = value[abs(first)]
                if (fv if first > 0 else -fv) == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    lv = value[abs(lk)]
                    if (lv if lk > 0 else -lv) != -1:
                        c[1], c[k] = lk, false_lit
                        self.watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if (fv if first > 0 else -fv) == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(self.trail)
                        return c
                    self.propagations += 1
                    self._enqueue(first, c)
            del ws[j:]
        return None

    # -- conflict analysis -------------------------------------------------

    def _analyze(self, confl):
        seen = set()
        learnt = [0]
        counter = 0
        p = None
        idx = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        clause = confl
        while True:
            for q in clause:
                if p is not None and q == p:
                    continue
                v = abs(q)
                if v not in seen and self.level[v] > 0:
                    seen.add(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen.discard(abs(p))
            counter -= 1
            if counter == 0:
                break
            clause = self.reason[abs(p)]
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        # second watch goes on the literal from the highest remaining level
        best = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _backtrack(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        for lit in self.trail[stop:]:
            v = abs(lit)
            self.phase[v] = lit > 0
            self.value[v] = 0
            self.reason[v] = None
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        del self.flipped[lvl:]
        self.qhead = len(self.trail)

    # -- search ------------------------------------------------------------

    def _pick(self) -> int:
        for v in self.order:
            if self.value[v] == 0:
                return v if self.phase[v] else -v
        return 0

    def _new_level(self, lit: int, flipped: bool = False) -> None:
        self.trail_lim.append(len(self.trail))
        self.flipped.append(flipped)
        self._enqueue(lit, None)

    def _resolve_conflict(self, confl) -> bool:
        """Returns False when the formula is proven unsatisfiable."""
        self.conflicts += 1
        if not self.trail_lim:
            return False
        if self.learning:
            learnt, bt = self._analyze(confl)
            self._backtrack(bt)
            if len(learnt) == 1:
                self._enqueue(learnt[0], None)
            else:
                self.learned.append(learnt)
                self.watches[learnt[0]].append(learnt)
                self.watches[learnt[1]].append(learnt)
                self._enqueue(learnt[0], learnt)
            return True
        # chronological DPLL: flip the deepest decision not yet flipped
        lvl = len(self.trail_lim)
        while lvl > 0 and self.flipped[lvl - 1]:
            lvl -= 1
        if lvl == 0:
            return False
        decision = self.trail[self.trail_lim[lvl - 1]]
        self._backtrack(lvl - 1)
        self._new_level(-decision, flipped=True)
        return True

    def solve(self, timeout_s: float | None = None) -> SatResult:
        deadline = None if timeout_s is None else time.monotonic() + timeout_s
        if not self.ok or self._propagate() is not None:
            return self._result("unsat")
        restart_no = 1
        budget = luby(restart_no) * RESTART_UNIT
        try:
            while True:
                confl = self._propagate()
                if confl is not None:
                    if not self._resolve_conflict(confl):
                        return self._result("unsat")
                    budget -= 1
                    continue
                if budget <= 0 and self.learning:
                    self._check_deadline(deadline)
                    restart_no += 1
                    budget = luby(restart_no) * RESTART_UNIT
                    self._backtrack(0)
                    continue
                self._check_deadline(deadline)
                lit = self._pick()
                if lit == 0:
                    return self._result("sat")
                self.decisions += 1
                self._new_level(lit)
        except _Timeout:
            return self._result("timeout")

    @staticmethod
    def _check_deadline(deadline):
        if deadline is not None and time.monotonic() >= deadline:
            raise _Timeout

    def _result(self, status: str) -> SatResult:
        assignment = None
        if status == "sat":
            assignment = {v: self.value[v] == 1 for v in range(1, self.n + 1)}
            for c in self.original:
                if not any(assignment[abs(l)] == (l > 0) for l in c):
                    raise AssertionError(f"internal error: model violates clause {c}")
        return SatResult(status, assignment, self.decisions, self.propagations, self.conflicts)


def solve_cnf(num_vars: int, clauses, timeout_s: float | None = None, learning: bool = True) -> SatResult:
    return Solver(num_vars, clauses, learning=learning).solve(timeout_s)
