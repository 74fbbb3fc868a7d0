"""LLM connectors: a scripted one for replay and tests, and a live HTTP one.

A connector answers ``send(conversation, tools)`` with a :class:`Reply`.
Conversation messages are dicts with ``role`` (system, user, assistant,
tool) and ``content``; assistant messages may carry ``tool_calls`` and tool
messages carry ``tool_call_id`` and ``name``.
"""

from __future__ import annotations

import json
import math
import os
import urllib.error
import urllib.request
from dataclasses import dataclass, field


class ConnectorError(RuntimeError):
    pass


@dataclass
class Reply:
    assistant_text: str
    tool_calls: list[dict] = field(default_factory=list)  # [{name, arguments}]
    token_usage: dict = field(default_factory=lambda: {"input": 0, "output": 0})


def estimate_tokens(text: str) -> int:
    """Rough count used by the scripted connector: one token per 4 chars."""
    return math.ceil(len(text) / 4)


def _conversation_text(conversation) -> str:
    return "".join(str(m.get("content", "")) + json.dumps(m.get("tool_calls", []), sort_keys=True)
                   for m in conversation)


class ScriptedConnector:
    """Replays a fixed list of steps.

    The reply depends only on the conversation: the n-th assistant turn in
    the conversation gets the n-th scripted step of this role. Running out
    of steps yields an empty reply, which ends the agent loop.
    """

    def __init__(self, steps: list[dict], role: str = "agent"):
        self.role = role
        self.script = list(steps)
        self.steps = [s for s in steps if s.get("role", "agent") == role]
        self.calls = 0

    @classmethod
    def from_file(cls, path, role: str = "agent") -> "ScriptedConnector":
        with open(path) as fh:
            steps = json.load(fh)
        if not isinstance(steps, list):
            raise ValueError(f"{path}: script must be a JSON list of steps")
        return cls(steps, role)

    def for_role(self, role: str) -> "ScriptedConnector":
        return ScriptedConnector(self.script, role)

    def send(self, conversation: list[dict], tools: list[dict]) -> Reply:
        self.calls += 1
        turn = sum(1 for m in conversation if m.get("role") == "assistant")
        step = self.steps[turn] if turn < len(self.steps) else {"assistant_text": "", "tool_calls": []}
        offered = {t["name"] for t in tools}
        calls = []
        for c in step.get("tool_calls", []):
            if c.get("name") not in offered:
                raise ConnectorError(f"scripted step {turn} calls unoffered tool {c.get('name')!r}")
            calls.append({"name": c["name"], "arguments": dict(c.get("arguments") or {})})
        text = step.get("assistant_text", "")
        usage = {
            "input": estimate_tokens(_conversation_text(conversation)),
            "output": estimate_tokens(text + json.dumps(calls, sort_keys=True)),
        }
        return Reply(text, calls, usage)


def scripted_pair(path) -> tuple[ScriptedConnector, ScriptedConnector]:
    """Agent and reviewer connectors from one script file."""
    agent = ScriptedConnector.from_file(path, "agent")
    return agent, agent.for_role("reviewer")


class LiveConnector:
    """Chat-completions style HTTP API with function tools.

    Configured by MCP_CLIENT_LLM_URL (full endpoint URL), MCP_CLIENT_LLM_KEY
    and MCP_CLIENT_LLM_MODEL.
    """

    def __init__(self, url: str | None = None, key: str | None = None, model: str | None = None,
                 timeout_s: float = 120.0):
        self.url = url or os.environ.get("MCP_CLIENT_LLM_URL")
        self.key = key or os.environ.get("MCP_CLIENT_LLM_KEY")
        self.model = model or os.environ.get("MCP_CLIENT_LLM_MODEL")
        self.timeout_s = timeout_s
        if not self.url or not self.model:
            raise ConnectorError("live connector needs MCP_CLIENT_LLM_URL and MCP_CLIENT_LLM_MODEL")

    @staticmethod
    def _wire_messages(conversation):
        out = []
        for m in conversation:
            if m["role"] == "assistant":
                msg = {"role": "assistant", "content": m.get("content") or None}
                if m.get("tool_calls"):
                    msg["tool_calls"] = [
                        {"id": c["id"], "type": "function",
                         "function": {"name": c["name"], "arguments": json.dumps(c["arguments"])}}
                        for c in m["tool_calls"]
                    ]
                out.append(msg)
            elif m["role"] == "tool":
                out.append({"role": "tool", "tool_call_id": m["tool_call_id"], "content": m["content"]})
            else:
                out.append({"role": m["role"], "content": m["content"]})
        return out

    def send(self, conversation: list[dict], tools: list[dict]) -> Reply:
        body = {"model": self.model, "messages": self._wire_messages(conversation)}
        if tools:
            body["tools"] = [{"type": "function", "function": {
                "name": t["name"], "description": t["description"], "parameters": t["inputSchema"]}}
                for t in tools]
        headers = {"Content-Type": "application/json"}
        if self.key:
            headers["Authorization"] = f"Bearer {self.key}"
        req = urllib.request.Request(self.url, data=json.dumps(body).encode(), headers=headers, method="POST")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout_s) as resp:
                data = json.load(resp)
        except (urllib.error.URLError, TimeoutError, OSError, json.JSONDecodeError) as exc:
            raise ConnectorError(f"LLM request failed: {exc}") from exc
        try:
            msg = data["choices"][0]["message"]
        except (KeyError, IndexError, TypeError):
            raise ConnectorError(f"unexpected LLM response: {str(data)[:200]}") from None
        offered = {t["name"] for t in tools}
        calls = []
        for c in msg.get("tool_calls") or []:
            fn = c.get("function", {})
            try:
                args = json.loads(fn.get("arguments") or "{}")
            except json.JSONDecodeError:
                args = {"_unparsed": fn.get("arguments")}
            if fn.get("name") in offered:
                calls.append({"name": fn["name"], "arguments": args})
        usage = data.get("usage") or {}
        return Reply(msg.get("content") or "", calls,
                     {"input": int(usage.get("prompt_tokens", 0)), "output": int(usage.get("completion_tokens", 0))})
