"""Isolated execution of solver child processes.

Every solver run goes through :func:`run_isolated`: the child gets its own
process group, a scrubbed environment and a throwaway working directory,
and the whole group is torn down before the call returns.
"""

from __future__ import annotations

import os
import shutil
import signal
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass, field

OUTPUT_CAP = 1 << 20  # bytes kept per stream
KILL_GRACE_S = 0.5
DEFAULT_ENV_ALLOWLIST = ("PATH", "HOME", "LANG", "LC_ALL", "TMPDIR")


class SpawnError(Exception):
    """The child could not be started at all (missing binary, permissions)."""

    def __init__(self, argv0: str, reason: str):
        super().__init__(f"cannot start {argv0!r}: {reason}")
        self.argv0 = argv0
        self.reason = reason


@dataclass
class ProcessSpec:
    argv: list[str]
    timeout_s: float
    stdin_text: str | None = None
    env_allowlist: tuple[str, ...] = DEFAULT_ENV_ALLOWLIST
    workdir: str | None = None  # None: fresh temp dir, removed afterwards
    extra_env: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.argv:
            raise ValueError("argv must be non-empty")
        if not self.timeout_s > 0:
            raise ValueError(f"timeout_s must be positive, got {self.timeout_s}")


@dataclass
class ProcessResult:
    exit_code: int | None  # None when the sandbox killed the child
    stdout_text: str
    stderr_text: str
    wall_time_s: float
    timed_out: bool


class _CappedReader(threading.Thread):
    # drains a pipe to EOF, keeping at most `cap` bytes
    def __init__(self, stream, cap: int):
        super().__init__(daemon=True)
        self.stream = stream
        self.cap = cap
        self.chunks: list[bytes] = []
        self.kept = 0
        self.truncated = False

    def run(self):
        try:
            while True:
                chunk = self.stream.read1(65536) if hasattr(self.stream, "read1") else self.stream.read(65536)
                if not chunk:
                    break
                room = self.cap - self.kept
                if room > 0:
                    self.chunks.append(chunk[:room])
                    self.kept += min(room, len(chunk))
                if len(chunk) > room:
                    self.truncated = True
        except (OSError, ValueError):
            pass

    def text(self) -> str:
        return b"".join(self.chunks).decode("utf-8", errors="replace")


def _scrubbed_env(spec: ProcessSpec) -> dict[str, str]:
    env = {k: os.environ[k] for k in spec.env_allowlist if k in os.environ}
    env.update(spec.extra_env)
    return env


def _signal_group(pgid: int, sig: int) -> None:
    try:
        os.killpg(pgid, sig)
    except (ProcessLookupError, PermissionError):
        pass


def _feed_stdin(proc: subprocess.Popen, text: str | None) -> None:
    try:
        if text:
            proc.stdin.write(text.encode("utf-8"))
        proc.stdin.close()
    except (BrokenPipeError, OSError, ValueError):
        pass


def group_alive(pgid: int) -> bool:
    """True if a live (non-zombie) process is still in group `pgid`.

    Zombies are ignored: they run nothing, and an init process that never
    reaps would otherwise keep them in the group forever.
    """
    try:
        os.killpg(pgid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    if not os.path.isdir("/proc/self"):
        return True
    for entry in os.listdir("/proc"):
        if not entry.isdigit():
            continue
        try:
            with open(f"/proc/{entry}/stat") as fh:
                stat = fh.read()
        except OSError:
            continue
        # fields after the parenthesized command: state ppid pgrp ...
        fields = stat[stat.rfind(")") + 2:].split()
        if len(fields) > 2 and int(fields[2]) == pgid and fields[0] not in ("Z", "X"):
            return True
    return False


def _await_group_exit(pgid: int, limit_s: float) -> None:
    # killed grandchildren are reparented and vanish once their new parent reaps them
    end = time.monotonic() + limit_s
    while group_alive(pgid) and time.monotonic() < end:
        time.sleep(0.005)


def run_isolated(spec: ProcessSpec, on_spawn=None) -> ProcessResult:
    """Run `spec.argv` under a wall-clock deadline and return its captured output.

    On expiry the whole process group gets SIGTERM, then SIGKILL after
    KILL_GRACE_S. The group is always SIGKILLed on the way out so no
    descendant survives the call. `on_spawn(pid)` is a test hook.

    Raises SpawnError if the executable cannot be started.
    """
    own_dir = spec.workdir is None
    workdir = tempfile.mkdtemp(prefix="cmcp-") if own_dir else spec.workdir
    try:
        return _run(spec, workdir, on_spawn)
    finally:
        if own_dir:
            shutil.rmtree(workdir, ignore_errors=True)


def _run(spec: ProcessSpec, workdir: str, on_spawn) -> ProcessResult:
    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            spec.argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            cwd=workdir,
            env=_scrubbed_env(spec),
            start_new_session=True,
        )
    except FileNotFoundError:
        raise SpawnError(spec.argv[0], "executable not found") from None
    except PermissionError:
        raise SpawnError(spec.argv[0], "permission denied") from None
    except OSError as exc:
        raise SpawnError(spec.argv[0], exc.strerror or str(exc)) from None

    pgid = proc.pid  # start_new_session makes the child its own group leader
    if on_spawn is not None:
        on_spawn(proc.pid)
    out = _CappedReader(proc.stdout, OUTPUT_CAP)
    err = _CappedReader(proc.stderr, OUTPUT_CAP)
    out.start()
    err.start()
    feeder = threading.Thread(target=_feed_stdin, args=(proc, spec.stdin_text), daemon=True)
    feeder.start()

    timed_out = False
    try:
        proc.wait(timeout=spec.timeout_s)
    except subprocess.TimeoutExpired:
        timed_out = True
        _signal_group(pgid, signal.SIGTERM)
        try:
            proc.wait(timeout=KILL_GRACE_S)
        except subprocess.TimeoutExpired:
            _signal_group(pgid, signal.SIGKILL)
            proc.wait()
    wall = time.monotonic() - start
    # reap stragglers that outlived the leader
    _signal_group(pgid, signal.SIGKILL)
    _await_group_exit(pgid, KILL_GRACE_S)

    for t in (out, err, feeder):
        t.join(timeout=1.0)
    for stream in (proc.stdout, proc.stderr):
        try:
            stream.close()
        except OSError:
            pass

    stderr_text = err.text()
    if out.truncated:
        stderr_text += f"\n[sandbox: stdout truncated at {OUTPUT_CAP} bytes]"
    if err.truncated:
        stderr_text += f"\n[sandbox: stderr truncated at {OUTPUT_CAP} bytes]"

    exit_code = proc.returncode
    if timed_out:
        exit_code = None
    return ProcessResult(
        exit_code=exit_code,
        stdout_text=out.text(),
        stderr_text=stderr_text,
        wall_time_s=wall,
        timed_out=timed_out,
    )

