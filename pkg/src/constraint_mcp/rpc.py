"""JSON-RPC 2.0 envelopes and newline-delimited framing."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32603
NOT_INITIALIZED = -32002


class _Absent:
    """Marks a missing member; distinct from JSON null."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "ABSENT"

    def __bool__(self):
        return False


ABSENT = _Absent()


class RpcError(Exception):
    def __init__(self, code: int, message: str, data: Any = ABSENT, id: Any = ABSENT):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.data = data
        self.id = id

    def to_dict(self) -> dict:
        d = {"code": self.code, "message": self.message}
        if self.data is not ABSENT:
            d["data"] = self.data
        return d


@dataclass
class RpcEnvelope:
    id: Any = ABSENT
    method: Any = ABSENT
    params: Any = ABSENT
    result: Any = ABSENT
    error: Any = ABSENT
    version: str = "2.0"

    @property
    def is_request(self) -> bool:
        return self.method is not ABSENT and self.id is not ABSENT

    @property
    def is_notification(self) -> bool:
        return self.method is not ABSENT and self.id is ABSENT

    @property
    def is_response(self) -> bool:
        return self.method is ABSENT

    def check(self) -> None:
        if self.version != "2.0":
            raise RpcError(INVALID_REQUEST, "jsonrpc must be \"2.0\"", id=self.id)
        if self.method is not ABSENT:
            if not isinstance(self.method, str):
                raise RpcError(INVALID_REQUEST, "method must be a string", id=self.id)
            if self.result is not ABSENT or self.error is not ABSENT:
                raise RpcError(INVALID_REQUEST, "a request cannot carry result or error", id=self.id)
            if self.params is not ABSENT and not isinstance(self.params, (dict, list)):
                raise RpcError(INVALID_REQUEST, "params must be an object or array", id=self.id)
        else:
            if (self.result is ABSENT) == (self.error is ABSENT):
                raise RpcError(INVALID_REQUEST, "need a method, or exactly one of result/error", id=self.id)
            if self.id is ABSENT:
                raise RpcError(INVALID_REQUEST, "a response needs an id")
            if self.error is not ABSENT and not (
                isinstance(self.error, dict) and isinstance(self.error.get("code"), int)
                and isinstance(self.error.get("message"), str)
            ):
                raise RpcError(INVALID_REQUEST, "error must be {code, message}", id=self.id)
        if self.id is not ABSENT and self.id is not None and (
            isinstance(self.id, bool) or not isinstance(self.id, (int, str))
        ):
            raise RpcError(INVALID_REQUEST, "id must be an integer, string or null")

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"jsonrpc": self.version}
        for key in ("id", "method", "params", "result", "error"):
            val = getattr(self, key)
            if val is not ABSENT:
                d[key] = val
        return d


def request(id, method: str, params=ABSENT) -> RpcEnvelope:
    return RpcEnvelope(id=id, method=method, params=params)


def notification(method: str, params=ABSENT) -> RpcEnvelope:
    return RpcEnvelope(method=method, params=params)


def response(id, result) -> RpcEnvelope:
    return RpcEnvelope(id=id, result=result)


def error_response(id, code: int, message: str, data: Any = ABSENT) -> RpcEnvelope:
    err = RpcError(code, message, data)
    return RpcEnvelope(id=None if id is ABSENT else id, error=err.to_dict())


def codec_decode(line: str | bytes) -> RpcEnvelope:
    """Decode one transport line. Raises RpcError(-32700 | -32600)."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError:
            raise RpcError(PARSE_ERROR, "line is not valid UTF-8") from None
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RpcError(PARSE_ERROR, f"parse error: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise RpcError(INVALID_REQUEST, "message must be a JSON object (batches are not supported)")
    unknown = set(obj) - {"jsonrpc", "id", "method", "params", "result", "error"}
    env = RpcEnvelope(
        id=obj.get("id", ABSENT),
        method=obj.get("method", ABSENT),
        params=obj.get("params", ABSENT),
        result=obj.get("result", ABSENT),
        error=obj.get("error", ABSENT),
        version=obj.get("jsonrpc", ABSENT),
    )
    if unknown:
        raise RpcError(INVALID_REQUEST, f"unexpected members {sorted(unknown)}", id=env.id)
    env.check()
    return env


def codec_encode(env: RpcEnvelope) -> str:
    """One line of compact JSON with a trailing newline."""
    env.check()
    return json.dumps(env.to_dict(), separators=(",", ":"), ensure_ascii=False) + "\n"
