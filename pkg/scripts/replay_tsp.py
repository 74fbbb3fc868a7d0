#!/usr/bin/env python3
"""Replay the scripted TSP session against the MiniZinc backend and print
the transcript, solution, verdict and tool-usage stats."""
import argparse
import json
import os
import sys
import time
from pathlib import Path

from constraint_mcp import sandbox
from constraint_mcp.backends.minizinc import MiniZincBackend, MznConfig
from constraint_mcp.client import run_client
from constraint_mcp.client.agent import transcript_summary
from constraint_mcp.client.connectors import scripted_pair
from constraint_mcp.client.handles import InProcessServer

ROOT = Path(__file__).resolve().parents[1]
WASM = ROOT / "tools" / "minizinc-wasm" / "minizinc"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--problem", type=Path, default=ROOT / "fixtures" / "tsp.txt")
    ap.add_argument("--script", type=Path, default=ROOT / "fixtures" / "tsp_replay.json")
    ap.add_argument("--mzn-exe", help="MiniZinc executable (default: $MCP_SOLVER_MZN, PATH, bundled shim)")
    args = ap.parse_args()

    cfg = MznConfig.discover(args.mzn_exe)
    if cfg.executable_path is None and WASM.exists():
        cfg = MznConfig.discover(str(WASM))
    if cfg.executable_path is None:
        sys.exit("no MiniZinc executable found")

    child = [0.0]
    real = sandbox.run_isolated

    def timed(spec, on_spawn=None):
        r = real(spec, on_spawn)
        child[0] += r.wall_time_s
        return r

    sandbox.run_isolated = timed
    agent, reviewer = scripted_pair(args.script)
    t0 = time.monotonic()
    with InProcessServer("minizinc", MiniZincBackend(cfg)) as server:
        server.initialize()
        report = run_client(args.problem.read_text(), agent, reviewer, server)
    wall = time.monotonic() - t0

    print(transcript_summary(report.transcript))
    print("\nsolution:", json.dumps(report.solution))
    print(f"verdict: {report.verdict.verdict.upper()}: {report.verdict.explanation}")
    print("stats:", report.stats.short())
    print(f"time: {wall:.2f}s total, {child[0]:.2f}s inside MiniZinc, {wall - child[0]:.2f}s client and server")


if __name__ == "__main__":
    main()
