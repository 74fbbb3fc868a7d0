"""One-shot ReAct loop: the LLM picks tool calls, the server runs them,
outcomes go back into the conversation until the LLM stops calling tools."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .. import rpc
from .connectors import ConnectorError

COUNT_FIELDS = {
    "clear_model": "clear_count",
    "add_item": "add_count",
    "replace_item": "replace_count",
    "delete_item": "delete_count",
    "get_model": "get_count",
    "solve_model": "solve_count",
}

VERIFY_REQUEST = (
    "When the model is solved, check the reported values against every requirement in the problem "
    "statement before giving your final answer. If a requirement is violated or missing from the "
    "model, fix the model and solve again. Stop calling tools once you are confident in the answer."
)


@dataclass
class Step:
    assistant_text: str
    tool_calls: list[dict] = field(default_factory=list)  # [{id, name, arguments}]
    tool_outcomes: list[dict] = field(default_factory=list)  # [{id, name, text, is_error, structured}]
    token_usage: dict = field(default_factory=lambda: {"input": 0, "output": 0})


@dataclass
class AgentTranscript:
    steps: list[Step] = field(default_factory=list)
    final_solution: dict | None = None
    final_model_text: str = ""
    stop_reason: str = "finished"  # finished | step_limit | connector_error
    error: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class UsageStats:
    clear_count: int = 0
    add_count: int = 0
    replace_count: int = 0
    delete_count: int = 0
    get_count: int = 0
    solve_count: int = 0
    tokens_in: int = 0
    tokens_out: int = 0

    def tool_total(self) -> int:
        return sum(getattr(self, f) for f in COUNT_FIELDS.values())

    def short(self) -> str:
        return (f"C={self.clear_count} A={self.add_count} R={self.replace_count} D={self.delete_count} "
                f"G={self.get_count} S={self.solve_count} tokens_in={self.tokens_in} tokens_out={self.tokens_out}")

    def __add__(self, other: "UsageStats") -> "UsageStats":
        return UsageStats(**{k: getattr(self, k) + getattr(other, k) for k in asdict(self)})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunResult:
    transcript: AgentTranscript
    solution: dict | None
    stats: UsageStats


def tally_stats(transcript: AgentTranscript, extra_usage=()) -> UsageStats:
    """Per-tool counts from the transcript; tokens over all connector calls."""
    stats = UsageStats()
    for step in transcript.steps:
        for call in step.tool_calls:
            f = COUNT_FIELDS.get(call["name"])
            if f:
                setattr(stats, f, getattr(stats, f) + 1)
        stats.tokens_in += step.token_usage.get("input", 0)
        stats.tokens_out += step.token_usage.get("output", 0)
    for u in extra_usage:
        stats.tokens_in += u.get("input", 0)
        stats.tokens_out += u.get("output", 0)
    return stats


def system_prompt(instructions: str) -> str:
    return instructions.rstrip() + "\n\n" + VERIFY_REQUEST


def _run_tool(server, call_id: str, name: str, args: dict) -> dict:
    try:
        res = server.call_tool(name, args)
    except rpc.RpcError as exc:
        return {"id": call_id, "name": name, "text": f"protocol error {exc.code}: {exc.message}",
                "is_error": True, "structured": None}
    text = "\n".join(c.get("text", "") for c in res.get("content", []) if c.get("type") == "text")
    return {"id": call_id, "name": name, "text": text, "is_error": bool(res.get("isError")),
            "structured": res.get("structuredContent")}


def run_one_shot(problem_text: str, connector, server, step_limit: int = 50) -> RunResult:
    """Drive the agent until it stops calling tools or `step_limit` steps ran.

    The solution is the last solve_model result of a run that finished on
    its own; runs cut off by the step limit or a connector failure report
    no solution.
    """
    if step_limit < 1:
        raise ValueError("step_limit must be at least 1")
    tools = server.list_tools()
    conversation = [
        {"role": "system", "content": system_prompt(server.instruction_prompt())},
        {"role": "user", "content": problem_text},
    ]
    transcript = AgentTranscript()
    last_solution = None
    for n in range(step_limit):
        try:
            reply = connector.send(conversation, tools)
        except ConnectorError as exc:
            transcript.stop_reason, transcript.error = "connector_error", str(exc)
            break
        calls = [{"id": f"call_{n}_{j}", "name": c["name"], "arguments": c["arguments"]}
                 for j, c in enumerate(reply.tool_calls)]
        step = Step(reply.assistant_text, calls, [], dict(reply.token_usage))
        transcript.steps.append(step)
        conversation.append({"role": "assistant", "content": reply.assistant_text, "tool_calls": calls})
        if not calls:
            break
        for c in calls:
            out = _run_tool(server, c["id"], c["name"], c["arguments"])
            step.tool_outcomes.append(out)
            conversation.append({"role": "tool", "tool_call_id": c["id"], "name": c["name"], "content": out["text"]})
            if c["name"] == "solve_model" and isinstance(out["structured"], dict) and "status" in out["structured"]:
                last_solution = out["structured"]
    else:
        transcript.stop_reason = "step_limit"

    try:
        model = server.call_tool("get_model", {})
        transcript.final_model_text = "\n".join(c.get("text", "") for c in model.get("content", []))
    except rpc.RpcError:
        transcript.final_model_text = ""
    if transcript.stop_reason == "finished":
        transcript.final_solution = last_solution
    return RunResult(transcript, transcript.final_solution, tally_stats(transcript))


def transcript_summary(t: AgentTranscript) -> str:
    lines = []
    for i, s in enumerate(t.steps, 1):
        names = ", ".join(c["name"] for c in s.tool_calls) or "(no tool calls)"
        lines.append(f"step {i}: {names}")
        for o in s.tool_outcomes:
            flag = " [error]" if o["is_error"] else ""
            first = o["text"].splitlines()[0] if o["text"] else ""
            lines.append(f"    {o['name']}{flag}: {first[:100]}")
    lines.append(f"stop: {t.stop_reason}" + (f" ({t.error})" if t.error else ""))
    return "\n".join(lines)


def dumps_solution(sol: dict | None) -> str:
    return json.dumps(sol, sort_keys=False) if sol is not None else "null"
