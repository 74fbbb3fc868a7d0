#!/usr/bin/env python3
"""Time the embedded CDCL solver on random 3-SAT near the phase transition
and on pigeonhole instances, with and without clause learning."""
import argparse
import random
import time

from constraint_mcp.backends.cdcl import solve_cnf


def random_3sat(rng, n, ratio=4.26):
    return [[rng.choice((1, -1)) * v for v in rng.sample(range(1, n + 1), 3)] for _ in range(int(ratio * n))]


def pigeonhole(p, h):
    var = lambda i, j: i * h + j + 1
    clauses = [[var(i, j) for j in range(h)] for i in range(p)]
    clauses += [[-var(i, j), -var(k, j)] for j in range(h) for i in range(p) for k in range(i + 1, p)]
    return p * h, clauses


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 150])
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--timeout", type=float, default=10.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    print(f"{'instance':<18}{'learning':>9}{'sat':>5}{'unsat':>6}{'t/o':>5}{'mean s':>9}")
    for n in args.sizes:
        formulas = [random_3sat(rng, n) for _ in range(args.instances)]
        for learning in (True, False):
            counts = {"sat": 0, "unsat": 0, "timeout": 0}
            t0 = time.monotonic()
            for cl in formulas:
                counts[solve_cnf(n, cl, learning=learning, timeout_s=args.timeout).result] += 1
            mean = (time.monotonic() - t0) / len(formulas)
            print(f"{'3sat n=' + str(n):<18}{str(learning):>9}{counts['sat']:>5}{counts['unsat']:>6}"
                  f"{counts['timeout']:>5}{mean:>9.3f}")
    for p in (6, 7, 8):
        n, cl = pigeonhole(p, p - 1)
        for learning in (True, False):
            t0 = time.monotonic()
            r = solve_cnf(n, cl, learning=learning, timeout_s=args.timeout)
            print(f"{'php ' + str(p) + '/' + str(p - 1):<18}{str(learning):>9}  {r.result:<14}"
                  f"{time.monotonic() - t0:>6.3f}")


if __name__ == "__main__":
    main()
