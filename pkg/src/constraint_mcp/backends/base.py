from __future__ import annotations

import os
import shutil


class Backend:
    """One solving paradigm. Subclasses implement validate() and solve().

    validate(items) -> list[Diagnostic]   (full candidate model)
    solve(items, timeout_s) -> Solution   (never raises)
    """

    mode = "?"

    def validate(self, items):
        raise NotImplementedError

    def solve(self, items, timeout_s: float):
        raise NotImplementedError


def discover_executable(explicit: str | None, env_var: str, names) -> str | None:
    """Config flag first, then the environment variable, then PATH.

    A flag or variable that is set but does not resolve yields None rather
    than silently falling through to a different binary.
    """
    for candidate in (explicit, os.environ.get(env_var)):
        if candidate:
            return _resolve(candidate)
    for name in names:
        found = shutil.which(name)
        if found:
            return found
    return None


def _resolve(candidate: str) -> str | None:
    if os.sep in candidate:
        path = os.path.abspath(candidate)
        return path if os.path.isfile(path) and os.access(path, os.X_OK) else None
    return shutil.which(candidate)
