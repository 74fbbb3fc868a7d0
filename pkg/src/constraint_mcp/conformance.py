"""Golden-transcript helpers: a fixed SAT-mode session, replay over stdio,
and the normalization applied before byte comparison."""

from __future__ import annotations

import json
import re
import subprocess
import sys

_ID = re.compile(r'^\{"jsonrpc":"2\.0","id":(-?\d+|"(?:[^"\\]|\\.)*"|null)')
# solve_time appears both in structuredContent and inside the JSON text block
_SOLVE_TIME = re.compile(r'(solve_time\\?"\s*:\s*)-?[0-9.]+(?:[eE][-+]?\d+)?')


def _req(rid, method, params=None) -> dict:
    msg = {"jsonrpc": "2.0", "id": rid, "method": method}
    if params is not None:
        msg["params"] = params
    return msg


def _tool(rid, name, **args) -> dict:
    return _req(rid, "tools/call", {"name": name, "arguments": args})


def golden_requests() -> list[dict]:
    """initialize, tools/list, one call of each tool, shutdown."""
    return [
        _req(1, "initialize", {"protocolVersion": "2025-06-18", "capabilities": {},
                               "clientInfo": {"name": "golden", "version": "1"}}),
        {"jsonrpc": "2.0", "method": "notifications/initialized"},
        _req(2, "tools/list"),
        _tool(3, "clear_model"),
        _tool(4, "add_item", index=1, content="var a b"),
        _tool(5, "replace_item", index=1, content="var a b c"),
        _tool(6, "delete_item", index=4),
        _tool(7, "get_model"),
        _tool(8, "solve_model", timeout=5),
        _req(9, "shutdown"),
    ]


def encode_lines(messages) -> str:
    return "".join(json.dumps(m, separators=(",", ":")) + "\n" for m in messages)


def normalize(line: str) -> str:
    line = _ID.sub('{"jsonrpc":"2.0","id":"<id>"', line.rstrip("\n"))
    return _SOLVE_TIME.sub(r"\g<1>0", line)


def replay_stdio(stdin_text: str, mode: str = "sat", timeout: float = 30.0) -> list[str]:
    """Run ``constraint-mcp serve`` on the given input; return output lines."""
    proc = subprocess.run([sys.executable, "-m", "constraint_mcp", "serve", "--mode", mode],
                          input=stdin_text, capture_output=True, text=True, timeout=timeout)
    if proc.returncode != 0:
        raise RuntimeError(f"server exited {proc.returncode}: {proc.stderr.strip()}")
    return proc.stdout.splitlines()
