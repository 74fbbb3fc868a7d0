import os
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
_WASM_MZN = ROOT / "tools" / "minizinc-wasm" / "minizinc"

# Use the bundled WebAssembly MiniZinc when no native one is configured.
if not os.environ.get("MCP_SOLVER_MZN") and (_WASM_MZN.parent / "node_modules" / "minizinc").is_dir():
    os.environ["MCP_SOLVER_MZN"] = str(_WASM_MZN)

from constraint_mcp.backends.base import discover_executable  # noqa: E402

MZN_EXE = discover_executable(None, "MCP_SOLVER_MZN", ("minizinc",))
SMT_EXE = discover_executable(None, "MCP_SOLVER_SMT", ("z3",))

needs_mzn = pytest.mark.skipif(MZN_EXE is None, reason="SKIPPED: no MiniZinc executable found")
needs_smt = pytest.mark.skipif(SMT_EXE is None, reason="SKIPPED: no SMT solver executable found")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


# one line per acceptance criterion, echoed again in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
