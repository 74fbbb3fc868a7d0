"""One-shot agent client with an isolated reviewer."""

from __future__ import annotations

from dataclasses import dataclass, field

from .agent import AgentTranscript, RunResult, UsageStats, run_one_shot, tally_stats
from .review import ReviewVerdict, review


@dataclass
class ClientReport:
    runs: list[RunResult] = field(default_factory=list)
    verdict: ReviewVerdict | None = None
    stats: UsageStats = field(default_factory=UsageStats)

    @property
    def solution(self):
        return self.runs[-1].solution if self.runs else None

    @property
    def transcript(self) -> AgentTranscript | None:
        return self.runs[-1].transcript if self.runs else None

    def to_dict(self) -> dict:
        return {
            "solution": self.solution,
            "verdict": self.verdict.to_dict() if self.verdict else None,
            "stats": self.stats.to_dict(),
            "attempts": len(self.runs),
            "stop_reason": self.transcript.stop_reason if self.transcript else None,
            "model": self.transcript.final_model_text if self.transcript else "",
        }


def retry_prompt(problem_text: str, explanation: str) -> str:
    return (f"{problem_text}\n\nA reviewer judged the previous answer incorrect: {explanation}\n"
            "Revise the model and solve again.")


def run_client(problem_text: str, agent_connector, reviewer_connector, server,
               step_limit: int = 50, retries: int = 0) -> ClientReport:
    """run_one_shot then review; an incorrect verdict re-enters the loop up
    to `retries` times with the reviewer's explanation appended."""
    report = ClientReport()
    prompt = problem_text
    reviewer_usage = []
    for _attempt in range(retries + 1):
        run = run_one_shot(prompt, agent_connector, server, step_limit)
        report.runs.append(run)
        report.verdict = review(problem_text, run.transcript.final_model_text, run.solution, reviewer_connector)
        reviewer_usage.append(report.verdict.token_usage)
        if report.verdict.verdict != "incorrect":
            break
        prompt = retry_prompt(problem_text, report.verdict.explanation)
    total = UsageStats()
    for r in report.runs:
        total = total + r.stats
    report.stats = total + tally_stats(AgentTranscript(), reviewer_usage)
    return report


__all__ = ["ClientReport", "ReviewVerdict", "UsageStats", "review", "run_client", "run_one_shot", "tally_stats"]
