#!/usr/bin/env python3
"""Regenerate fixtures/golden_requests.jsonl and golden_responses.jsonl.

Only run this after an intended protocol change; the acceptance suite
compares against the stored responses.
"""
import argparse
from pathlib import Path

from constraint_mcp.conformance import encode_lines, golden_requests, normalize, replay_stdio

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "fixtures")
    args = ap.parse_args()
    requests = encode_lines(golden_requests())
    responses = [normalize(l) for l in replay_stdio(requests)]
    (args.out / "golden_requests.jsonl").write_text(requests)
    (args.out / "golden_responses.jsonl").write_text("\n".join(responses) + "\n")
    print(f"wrote {len(responses)} responses to {args.out}")


if __name__ == "__main__":
    main()
