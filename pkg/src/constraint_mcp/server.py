"""MCP server: session state, the six model tools, and request dispatch."""

from __future__ import annotations

import json
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Any

from . import __version__
from . import prompts
from . import rpc
from .backends import canonical_mode
from .model import EditRequest, ModelState, apply_edit, item_at_line, render_numbered
from .solution import Solution, error_solution

log = logging.getLogger("constraint_mcp.server")

PROTOCOL_VERSION = "2025-06-18"
TOOL_NAMES = ("clear_model", "add_item", "replace_item", "delete_item", "get_model", "solve_model")
PHASES = ("uninitialized", "initialized", "shutdown")


@dataclass
class ServerConfig:
    default_timeout_s: float = 10.0
    max_timeout_s: float = 30.0

    def __post_init__(self):
        if not self.max_timeout_s > 0:
            raise ValueError("max_timeout_s must be positive")
        self.default_timeout_s = min(self.default_timeout_s, self.max_timeout_s)


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    description: str
    input_schema: dict

    def to_dict(self) -> dict:
        return {"name": self.name, "description": self.description, "inputSchema": self.input_schema}


@dataclass
class ToolOutcome:
    text: str
    is_error: bool = False
    structured: dict | None = None

    def to_result(self) -> dict:
        out: dict[str, Any] = {"content": [{"type": "text", "text": self.text}], "isError": self.is_error}
        if self.structured is not None:
            out["structuredContent"] = self.structured
        return out


class SessionState:
    """One client session. The mode cannot change once set."""

    def __init__(self, mode: str, backend, config: ServerConfig | None = None):
        self._mode = canonical_mode(mode)
        self.backend = backend
        self.model = ModelState()
        self.config = config or ServerConfig()
        self.phase = "uninitialized"

    @property
    def mode(self) -> str:
        return self._mode


def _obj(props: dict, required: list) -> dict:
    return {"type": "object", "properties": props, "required": required, "additionalProperties": False}


_INDEX = {"type": "integer", "minimum": 1, "description": "1-based item position"}
_CONTENT = {"type": "string", "description": "one complete model item"}

_TOOLS = (
    ToolDescriptor("clear_model", "Remove every item from the model.", _obj({}, [])),
    ToolDescriptor("add_item", "Insert a new item at the given index; later items shift down. "
                   "The edit is kept only if the whole model still validates.",
                   _obj({"index": _INDEX, "content": _CONTENT}, ["index", "content"])),
    ToolDescriptor("replace_item", "Replace the item at the given index. "
                   "The edit is kept only if the whole model still validates.",
                   _obj({"index": _INDEX, "content": _CONTENT}, ["index", "content"])),
    ToolDescriptor("delete_item", "Delete the item at the given index; later items shift up. "
                   "The edit is kept only if the remaining model still validates.",
                   _obj({"index": _INDEX}, ["index"])),
    ToolDescriptor("get_model", "Show the current model with numbered items.", _obj({}, [])),
    ToolDescriptor("solve_model", "Solve the current model within a timeout in seconds and return the "
                   "solution fields status, satisfiable, values, objective, solve_time, success, message.",
                   _obj({"timeout": {"type": "number", "exclusiveMinimum": 0,
                                     "description": "wall-clock limit in seconds"}}, ["timeout"])),
)


def describe_tools(session: SessionState) -> list[ToolDescriptor]:
    if session.phase != "initialized":
        raise rpc.RpcError(rpc.NOT_INITIALIZED, f"session is {session.phase}; send initialize first")
    return list(_TOOLS)


# --- tools -------------------------------------------------------------------

class ArgumentError(ValueError):
    pass


def _int_arg(args: dict, name: str) -> int:
    if name not in args:
        raise ArgumentError(f"missing required argument '{name}'")
    v = args[name]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or v != int(v):
        raise ArgumentError(f"argument '{name}' must be an integer, got {v!r}")
    return int(v)


def _str_arg(args: dict, name: str) -> str:
    if name not in args:
        raise ArgumentError(f"missing required argument '{name}'")
    if not isinstance(args[name], str):
        raise ArgumentError(f"argument '{name}' must be a string")
    return args[name]


def _edit_outcome(session: SessionState, edit: EditRequest, items_before) -> ToolOutcome:
    res = apply_edit(session.model, edit, session.backend)
    cand_items = session.model.items if res.committed else _candidate_for_report(items_before, edit)
    lines = [res.message]
    for d in res.diagnostics:
        k = item_at_line(cand_items, d.line) if cand_items else None
        lines.append(f"  {d}" + (f" [item {k}]" if k else ""))
    structured = {
        "committed": res.committed,
        "version": res.version,
        "diagnostics": [d.to_dict() for d in res.diagnostics],
    }
    return ToolOutcome("\n".join(lines), is_error=not res.committed, structured=structured)


def _candidate_for_report(items, edit: EditRequest):
    items = list(items)
    try:
        if edit.kind == "add":
            items.insert(edit.index - 1, edit.content)
        elif edit.kind == "replace":
            items[edit.index - 1] = edit.content
        elif edit.kind == "delete":
            del items[edit.index - 1]
    except (IndexError, TypeError):
        pass
    return items


def _resolve_timeout(session: SessionState, args: dict) -> float:
    t = args.get("timeout")
    if t is None:
        return session.config.default_timeout_s
    if isinstance(t, bool) or not isinstance(t, (int, float)) or not math.isfinite(t) or t <= 0:
        raise ArgumentError(f"timeout must be a positive number of seconds, got {t!r}")
    return min(float(t), session.config.max_timeout_s)


def solve_current(session: SessionState, timeout_s: float) -> Solution:
    items = list(session.model.items)
    try:
        sol = session.backend.solve(items, timeout_s)
        if not isinstance(sol, Solution):
            raise TypeError(f"backend returned {type(sol).__name__}")
        return sol
    except Exception as exc:  # execution tier: never escapes as a protocol fault
        log.exception("solve failed")
        return error_solution(f"solver run failed: {type(exc).__name__}: {exc}")


def call_tool(session: SessionState, name: str, args: dict) -> ToolOutcome:
    before = list(session.model.items)
    try:
        if name == "clear_model":
            return _edit_outcome(session, EditRequest("clear"), before)
        if name == "add_item":
            edit = EditRequest("add", _int_arg(args, "index"), _str_arg(args, "content"))
            return _edit_outcome(session, edit, before)
        if name == "replace_item":
            edit = EditRequest("replace", _int_arg(args, "index"), _str_arg(args, "content"))
            return _edit_outcome(session, edit, before)
        if name == "delete_item":
            return _edit_outcome(session, EditRequest("delete", _int_arg(args, "index")), before)
        if name == "get_model":
            return ToolOutcome(render_numbered(session.model.items),
                               structured={"items": list(session.model.items), "version": session.model.version})
        if name == "solve_model":
            try:
                sol = solve_current(session, _resolve_timeout(session, args))
            except ArgumentError as exc:  # still answer with a full Solution record
                sol = error_solution(f"Invalid arguments for solve_model: {exc}")
            d = sol.to_dict()
            return ToolOutcome(json.dumps(d), is_error=not sol.success, structured=d)
    except ArgumentError as exc:
        return ToolOutcome(f"Invalid arguments for {name}: {exc}", is_error=True)
    raise rpc.RpcError(rpc.INVALID_PARAMS, f"unknown tool {name!r}; available: {', '.join(TOOL_NAMES)}")


# --- dispatch ----------------------------------------------------------------

def _initialize(session: SessionState, params: dict) -> dict:
    session.phase = "initialized"
    requested = params.get("protocolVersion") if isinstance(params, dict) else None
    return {
        "protocolVersion": requested if isinstance(requested, str) else PROTOCOL_VERSION,
        "capabilities": {"tools": {"listChanged": False}, "prompts": {"listChanged": False}},
        "serverInfo": {"name": "constraint-mcp", "version": __version__},
        "instructions": f"Constraint modeling server in {session.mode} mode; "
                        f"see prompt {prompts.prompt_name(session.mode)}.",
    }


def _require_initialized(session: SessionState):
    if session.phase != "initialized":
        raise rpc.RpcError(rpc.NOT_INITIALIZED, f"session is {session.phase}; send initialize first")


def _dispatch(session: SessionState, method: str, params) -> Any:
    params = params if isinstance(params, dict) else {}
    if method == "initialize":
        if session.phase == "shutdown":
            raise rpc.RpcError(rpc.INVALID_REQUEST, "session has been shut down")
        return _initialize(session, params)
    if method == "ping":
        return {}
    if method == "shutdown":
        session.phase = "shutdown"
        return {}
    if method == "tools/list":
        return {"tools": [t.to_dict() for t in describe_tools(session)]}
    if method == "tools/call":
        _require_initialized(session)
        name = params.get("name")
        args = params.get("arguments") or {}
        if not isinstance(name, str) or not isinstance(args, dict):
            raise rpc.RpcError(rpc.INVALID_PARAMS, "tools/call needs {name: string, arguments: object}")
        return call_tool(session, name, args).to_result()
    if method == "prompts/list":
        _require_initialized(session)
        return {"prompts": prompts.list_prompts(session.mode)}
    if method == "prompts/get":
        _require_initialized(session)
        got = prompts.get_prompt(session.mode, params.get("name"))
        if got is None:
            raise rpc.RpcError(rpc.INVALID_PARAMS, f"unknown prompt {params.get('name')!r}")
        return got
    raise rpc.RpcError(rpc.METHOD_NOT_FOUND, f"method not found: {method}")


def handle_request(session: SessionState, env: rpc.RpcEnvelope) -> rpc.RpcEnvelope | None:
    """Exactly one response per request; None for notifications and responses."""
    if env.is_response:
        return None
    if env.is_notification:
        if env.method not in ("notifications/initialized", "notifications/cancelled"):
            try:
                _dispatch(session, env.method, env.params)
            except Exception:
                log.debug("notification %s failed", env.method, exc_info=True)
        return None
    try:
        return rpc.response(env.id, _dispatch(session, env.method, env.params))
    except rpc.RpcError as exc:
        return rpc.error_response(env.id, exc.code, exc.message, exc.data)
    except Exception as exc:
        log.exception("internal error handling %s", env.method)
        return rpc.error_response(env.id, rpc.INTERNAL_ERROR, f"internal error: {type(exc).__name__}")


def handle_line(session: SessionState, line: str) -> str | None:
    """Decode one transport line, dispatch it, and encode the reply."""
    try:
        env = rpc.codec_decode(line)
    except rpc.RpcError as exc:
        rid = exc.id if exc.id is not rpc.ABSENT else None
        return rpc.codec_encode(rpc.error_response(rid, exc.code, exc.message))
    reply = handle_request(session, env)
    return rpc.codec_encode(reply) if reply is not None else None


def serve(session: SessionState, stdin=None, stdout=None) -> int:
    """Read requests line by line until EOF. Strictly one at a time."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        if not line.strip():
            continue
        reply = handle_line(session, line)
        if reply is not None:
            stdout.write(reply)
            stdout.flush()
    return 0
