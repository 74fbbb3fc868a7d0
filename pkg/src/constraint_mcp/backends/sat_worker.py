"""Child-process entry point for the embedded SAT solver.

Reads DIMACS on stdin and answers in the SAT-competition output format
(``s SATISFIABLE`` / ``v ... 0``), so any external DIMACS solver speaking the
same format can replace it.
"""

import argparse
import sys

from .cdcl import solve_cnf
from .cnf import from_dimacs


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="sat_worker")
    ap.add_argument("--timeout", type=float, default=None)
    args = ap.parse_args(argv)
    cnf = from_dimacs(sys.stdin.read())
    res = solve_cnf(cnf.num_vars, cnf.clauses, timeout_s=args.timeout)
    out = sys.stdout
    out.write(f"c decisions {res.decisions}\nc propagations {res.propagations}\nc conflicts {res.conflicts}\n")
    if res.result == "sat":
        out.write("s SATISFIABLE\n")
        lits = [v if val else -v for v, val in sorted(res.assignment.items())]
        out.write("v " + " ".join(map(str, lits)) + " 0\n")
        return 10
    if res.result == "unsat":
        out.write("s UNSATISFIABLE\n")
        return 20
    out.write("s UNKNOWN\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
