"""Solver backends, one per session mode."""

from __future__ import annotations

from .base import Backend

MODES = ("minizinc", "sat", "smt")
ALIASES = {"pysat": "sat", "z3": "smt"}


def canonical_mode(name: str) -> str:
    mode = ALIASES.get(name, name)
    if mode not in MODES:
        raise ValueError(f"unknown mode {name!r}; choose one of {', '.join(MODES)}")
    return mode


def make_backend(mode: str, mzn_exe: str | None = None, smt_exe: str | None = None) -> Backend:
    mode = canonical_mode(mode)
    if mode == "sat":
        from .sat import SatBackend

        return SatBackend()
    if mode == "smt":
        from .smt import SmtBackend, SmtConfig

        return SmtBackend(SmtConfig.discover(smt_exe))
    from .minizinc import MiniZincBackend, MznConfig

    return MiniZincBackend(MznConfig.discover(mzn_exe))


__all__ = ["ALIASES", "MODES", "Backend", "canonical_mode", "make_backend"]
