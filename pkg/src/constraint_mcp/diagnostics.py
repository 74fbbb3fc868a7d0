from __future__ import annotations

from dataclasses import asdict, dataclass

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """A validation finding; line is 1-based, column 0 means "whole line"."""

    severity: str
    line: int
    column: int
    message: str
    suggestion: str | None = None

    def __post_init__(self):
        if self.severity not in (ERROR, WARNING):
            raise ValueError(f"bad severity {self.severity!r}")
        if self.line < 1 or self.column < 0:
            raise ValueError(f"bad position {self.line}:{self.column}")

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["suggestion"] is None:
            del d["suggestion"]
        return d

    def __str__(self) -> str:
        pos = f"{self.line}:{self.column}" if self.column else f"{self.line}"
        s = f"{self.severity} at line {pos}: {self.message}"
        if self.suggestion:
            s += f" (hint: {self.suggestion})"
        return s


def error(line: int, message: str, column: int = 0, suggestion: str | None = None) -> Diagnostic:
    return Diagnostic(ERROR, max(1, line), max(0, column), message, suggestion)


def warning(line: int, message: str, column: int = 0, suggestion: str | None = None) -> Diagnostic:
    return Diagnostic(WARNING, max(1, line), max(0, column), message, suggestion)


def has_errors(diags) -> bool:
    return any(d.is_error for d in diags)
