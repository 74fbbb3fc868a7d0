"""Item-based model storage with validation-gated edits.

An edit is applied to a copy of the item list, the active backend validates
the whole candidate, and the copy replaces the live state only if no
error-severity diagnostic came back.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from . import diagnostics as dg
from .diagnostics import Diagnostic

EMPTY_MARKER = "(model is empty)"
ITEM_SEPARATOR = "\n"  # same for all three modes
EDIT_KINDS = ("add", "replace", "delete", "clear")


@dataclass
class ModelState:
    items: list[str] = field(default_factory=list)
    version: int = 0

    def __len__(self):
        return len(self.items)

    def snapshot(self) -> tuple[str, ...]:
        return tuple(self.items)


@dataclass(frozen=True)
class EditRequest:
    kind: str
    index: int | None = None
    content: str | None = None

    def __post_init__(self):
        if self.kind not in EDIT_KINDS:
            raise ValueError(f"unknown edit kind {self.kind!r}")


@dataclass
class EditResult:
    committed: bool
    diagnostics: list[Diagnostic]
    version: int
    message: str


def concat_model(items, mode: str | None = None) -> str:
    return ITEM_SEPARATOR.join(items)


def item_line_offsets(items) -> list[int]:
    """First line (1-based) of each item inside concat_model(items)."""
    offsets, line = [], 1
    for text in items:
        offsets.append(line)
        line += text.count("\n") + 1
    return offsets


def item_at_line(items, line: int) -> int | None:
    """1-based index of the item containing `line` of the concatenation."""
    found = None
    for k, start in enumerate(item_line_offsets(items), 1):
        if start <= line:
            found = k
    return found


def render_numbered(items) -> str:
    if not items:
        return EMPTY_MARKER
    width = len(str(len(items)))
    blocks = []
    for k, text in enumerate(items, 1):
        prefix = f"{k:>{width}} | "
        cont = " " * width + " | "
        lines = text.split("\n")
        blocks.append("\n".join([prefix + lines[0]] + [cont + ln for ln in lines[1:]]))
    return "\n".join(blocks)


def parse_numbered(rendering: str) -> list[str]:
    """Inverse of render_numbered."""
    if rendering == EMPTY_MARKER:
        return []
    items: list[list[str]] = []
    for line in rendering.split("\n"):
        head, sep, body = line.partition(" | ")
        if not sep:
            raise ValueError(f"not a numbered-model line: {line!r}")
        if head.strip():
            items.append([body])
        else:
            if not items:
                raise ValueError("continuation line before first item")
            items[-1].append(body)
    return ["\n".join(parts) for parts in items]


def _range_error(msg: str) -> Diagnostic:
    return dg.error(1, msg)


def _candidate(items: list[str], edit: EditRequest) -> list[str] | Diagnostic:
    n = len(items)
    if edit.kind in ("add", "replace"):
        if edit.content is None or not edit.content.strip():
            return dg.error(1, "item content is empty", suggestion="send one complete item as content")
    if not isinstance(edit.index, int) or isinstance(edit.index, bool):
        return _range_error(f"index must be an integer, got {edit.index!r}")
    cand = list(items)
    if edit.kind == "add":
        if not 1 <= edit.index <= n + 1:
            return _range_error(f"add index {edit.index} out of range 1..{n + 1}")
        cand.insert(edit.index - 1, edit.content)
    elif edit.kind == "replace":
        if not 1 <= edit.index <= n:
            return _range_error(f"replace index {edit.index} out of range 1..{n}" if n else "model is empty; nothing to replace")
        cand[edit.index - 1] = edit.content
    else:
        if not 1 <= edit.index <= n:
            return _range_error(f"delete index {edit.index} out of range 1..{n}" if n else "model is empty; nothing to delete")
        del cand[edit.index - 1]
    return cand


def apply_edit(model: ModelState, edit: EditRequest, backend) -> EditResult:
    """Validate `edit` against the full candidate model and commit on success.

    `backend.validate(items)` returns a list of Diagnostics. A rejected edit
    leaves `model` untouched.
    """
    if edit.kind == "clear":
        model.items = []
        model.version += 1
        return EditResult(True, [], model.version, "Model cleared")

    cand = _candidate(model.items, edit)
    if isinstance(cand, Diagnostic):
        return EditResult(False, [cand], model.version, f"Edit rejected: {cand.message}")

    try:
        diags = list(backend.validate(copy.copy(cand)))
    except Exception as exc:  # validator crash is an execution-tier failure
        diags = [dg.error(1, f"validator failed: {type(exc).__name__}: {exc}")]

    if dg.has_errors(diags):
        n_err = sum(d.is_error for d in diags)
        return EditResult(False, diags, model.version, f"Edit rejected: {n_err} validation error(s); model unchanged")

    model.items = cand
    model.version += 1
    verb = {"add": "added at", "replace": "replaced at", "delete": "deleted from"}[edit.kind]
    return EditResult(True, diags, model.version, f"Item {verb} index {edit.index}")
