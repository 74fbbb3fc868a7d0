#!/usr/bin/env python3
"""Run the acceptance suite and print only the per-criterion lines."""
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def main():
    proc = subprocess.run([sys.executable, "-m", "pytest", str(ROOT / "tests" / "test_acceptance.py"), "-q",
                           "-p", "no:cacheprovider"], cwd=ROOT, capture_output=True, text=True)
    lines = [l for l in proc.stdout.splitlines() if l.startswith("CRITERION ")]
    seen = set()
    for l in lines:  # each line appears in captured output and in the summary
        if l not in seen:
            seen.add(l)
            print(l)
    if not lines:
        print(proc.stdout[-2000:], proc.stderr[-2000:], sep="\n")
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())
