"""Session handles the agent talks to: in-process, or a server subprocess
over stdio. Both speak JSON-RPC lines, so the protocol path is the same."""

from __future__ import annotations

import itertools
import json
import subprocess
import sys

from .. import rpc
from ..server import ServerConfig, SessionState, handle_line


class ServerHandle:
    mode: str

    def _call(self, method: str, params=None) -> dict:
        raise NotImplementedError

    def initialize(self) -> dict:
        res = self._call("initialize", {"protocolVersion": "2025-06-18", "capabilities": {},
                                        "clientInfo": {"name": "constraint-mcp-client", "version": "0.1.0"}})
        self._notify("notifications/initialized")
        return res

    def _notify(self, method: str):
        pass

    def list_tools(self) -> list[dict]:
        return self._call("tools/list")["tools"]

    def call_tool(self, name: str, arguments: dict) -> dict:
        return self._call("tools/call", {"name": name, "arguments": arguments})

    def instruction_prompt(self) -> str:
        listed = self._call("prompts/list")["prompts"]
        got = self._call("prompts/get", {"name": listed[0]["name"]})
        return "\n".join(m["content"]["text"] for m in got["messages"])

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class InProcessServer(ServerHandle):
    def __init__(self, mode: str, backend, config: ServerConfig | None = None):
        self.session = SessionState(mode, backend, config)
        self.mode = self.session.mode
        self._ids = itertools.count(1)

    def _exchange(self, env: rpc.RpcEnvelope) -> dict | None:
        reply = handle_line(self.session, rpc.codec_encode(env))
        return json.loads(reply) if reply else None

    def _call(self, method, params=None):
        env = rpc.request(next(self._ids), method, rpc.ABSENT if params is None else params)
        return _unwrap(self._exchange(env))

    def _notify(self, method):
        self._exchange(rpc.notification(method))


class StdioServer(ServerHandle):
    """Spawns ``python -m constraint_mcp serve`` and talks over its pipes."""

    def __init__(self, mode: str, extra_args=(), python: str | None = None):
        self.mode = mode
        argv = [python or sys.executable, "-m", "constraint_mcp", "serve", "--mode", mode, *extra_args]
        self.proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, bufsize=1)
        self._ids = itertools.count(1)

    def _send(self, env: rpc.RpcEnvelope):
        self.proc.stdin.write(rpc.codec_encode(env))
        self.proc.stdin.flush()

    def _call(self, method, params=None):
        rid = next(self._ids)
        self._send(rpc.request(rid, method, rpc.ABSENT if params is None else params))
        while True:
            line = self.proc.stdout.readline()
            if not line:
                raise rpc.RpcError(rpc.INTERNAL_ERROR, "server closed the connection")
            msg = json.loads(line)
            if msg.get("id") == rid:
                return _unwrap(msg)

    def _notify(self, method):
        self._send(rpc.notification(method))

    def close(self):
        if self.proc.poll() is None:
            try:
                self.proc.stdin.close()
                self.proc.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                self.proc.kill()
                self.proc.wait()


def _unwrap(msg: dict | None) -> dict:
    if msg is None:
        raise rpc.RpcError(rpc.INTERNAL_ERROR, "no response")
    if "error" in msg:
        err = msg["error"]
        raise rpc.RpcError(err["code"], err["message"], err.get("data", rpc.ABSENT))
    return msg["result"]
