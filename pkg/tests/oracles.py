"""Independent reference procedures used as test oracles.

Nothing here imports the package's solver code.
"""

from itertools import product
from math import comb


def truth_table_sat(num_vars, clauses):
    """Return a satisfying assignment {var: bool} by enumeration, or None."""
    for bits in product((False, True), repeat=num_vars):
        a = {v + 1: bits[v] for v in range(num_vars)}
        if all(any(a[abs(l)] == (l > 0) for l in c) for c in clauses):
            return a
    return None


def satisfies(assignment, clauses):
    return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in clauses)


def simple_dpll(clauses, assumed=None):
    """Plain recursive DPLL with unit propagation. True iff satisfiable."""
    assumed = dict(assumed or {})
    clauses = [list(c) for c in clauses]
    while True:
        reduced, unit = [], None
        for c in clauses:
            if any(assumed.get(abs(l)) == (l > 0) for l in c if abs(l) in assumed):
                continue
            rest = [l for l in c if abs(l) not in assumed]
            if not rest:
                return False
            if len(rest) == 1 and unit is None:
                unit = rest[0]
            reduced.append(rest)
        clauses = reduced
        if unit is None:
            break
        assumed[abs(unit)] = unit > 0
    if not clauses:
        return True
    v = abs(clauses[0][0])
    return simple_dpll(clauses, {**assumed, v: True}) or simple_dpll(clauses, {**assumed, v: False})


def projected_models(num_base, clauses, brute_force_limit=16):
    """Set of base-variable tuples extendable to a full model.

    Uses full enumeration when the formula is small enough, otherwise
    DPLL on the auxiliaries with the base fixed.
    """
    num_vars = max([num_base] + [abs(l) for c in clauses for l in c])
    found = set()
    if num_vars <= brute_force_limit:
        for bits in product((False, True), repeat=num_vars):
            a = {v + 1: bits[v] for v in range(num_vars)}
            if satisfies(a, clauses):
                found.add(bits[:num_base])
        return found
    for bits in product((False, True), repeat=num_base):
        if simple_dpll(clauses, {v + 1: bits[v] for v in range(num_base)}):
            found.add(bits)
    return found


def expected_count(form, n, k):
    if form == "atmost":
        return sum(comb(n, i) for i in range(k + 1))
    if form == "atleast":
        return sum(comb(n, i) for i in range(k, n + 1))
    return comb(n, k)


def holds(form, bits, k):
    t = sum(bits)
    return {"atmost": t <= k, "atleast": t >= k, "exactly": t == k}[form]


def pigeonhole(pigeons, holes):
    var = lambda p, h: p * holes + h + 1
    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p in range(pigeons):
            for q in range(p + 1, pigeons):
                clauses.append([-var(p, h), -var(q, h)])
    return pigeons * holes, clauses


def distance_matrix(problem_text):
    """Rows of the whitespace table whose first token is the row number."""
    rows = {}
    for line in problem_text.splitlines():
        toks = line.split()
        if len(toks) > 2 and all(t.isdigit() for t in toks):
            rows[int(toks[0])] = [int(t) for t in toks[1:]]
    n = len(rows)
    return [rows[i] for i in range(1, n + 1)]


def tsp_brute_force(dist):
    """Shortest closed tour starting at city 0, by enumerating permutations."""
    from itertools import permutations

    n = len(dist)
    best, best_tour = None, None
    for perm in permutations(range(1, n)):
        tour = (0, *perm)
        length = sum(dist[tour[i]][tour[(i + 1) % n]] for i in range(n))
        if best is None or length < best:
            best, best_tour = length, tour
    return best, best_tour


def tour_length(dist, tour):
    n = len(tour)
    return sum(dist[tour[i]][tour[(i + 1) % n]] for i in range(n))
