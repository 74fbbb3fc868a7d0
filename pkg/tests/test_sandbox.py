import sys
import time

import pytest

from constraint_mcp.sandbox import OUTPUT_CAP, ProcessSpec, SpawnError, group_alive, run_isolated

PY = sys.executable


def test_echo():
    r = run_isolated(ProcessSpec([PY, "-c", "import sys; print(sys.stdin.read().upper())"], 5, stdin_text="hi"))
    assert r.exit_code == 0 and r.stdout_text == "HI\n" and not r.timed_out


def test_sleep_times_out():
    r = run_isolated(ProcessSpec(["sleep", "10"], 1))
    assert r.timed_out and r.exit_code is None
    assert 1 <= r.wall_time_s < 2


def test_missing_binary():
    with pytest.raises(SpawnError):
        run_isolated(ProcessSpec(["/nonexistent"], 1))


def test_ignores_sigterm_then_killed():
    code = "import signal, time; signal.signal(signal.SIGTERM, signal.SIG_IGN); print('up', flush=True); time.sleep(30)"
    r = run_isolated(ProcessSpec([PY, "-c", code], 0.5))
    assert r.timed_out and r.wall_time_s < 1.5 and "up" in r.stdout_text


def test_no_orphans_from_grandchildren():
    pgids = []
    code = "import subprocess; subprocess.Popen(['sleep','30']); subprocess.Popen(['sleep','30']); import time; time.sleep(30)"
    run_isolated(ProcessSpec([PY, "-c", code], 0.5), on_spawn=pgids.append)
    assert not group_alive(pgids[0])


def test_no_orphans_after_normal_exit():
    pgids = []
    code = "import subprocess; subprocess.Popen(['sleep','30'])"
    r = run_isolated(ProcessSpec([PY, "-c", code], 5), on_spawn=pgids.append)
    assert r.exit_code == 0 and not group_alive(pgids[0])


def test_env_scrubbed(monkeypatch):
    monkeypatch.setenv("SECRET_TOKEN", "x")
    r = run_isolated(ProcessSpec([PY, "-c", "import os; print(sorted(os.environ))"], 5, extra_env={"KEEP": "1"}))
    assert "SECRET_TOKEN" not in r.stdout_text and "KEEP" in r.stdout_text


def test_output_cap():
    r = run_isolated(ProcessSpec([PY, "-c", f"import sys; sys.stdout.write('x' * {OUTPUT_CAP * 2})"], 10))
    assert len(r.stdout_text) == OUTPUT_CAP and "truncated" in r.stderr_text


def test_stream_order_preserved():
    code = "import sys\nfor i in range(2000): sys.stdout.write(f'{i}\\n')"
    r = run_isolated(ProcessSpec([PY, "-c", code], 5))
    assert r.stdout_text.splitlines() == [str(i) for i in range(2000)]


def test_workdir_is_temporary():
    r = run_isolated(ProcessSpec([PY, "-c", "import os; print(os.getcwd())"], 5))
    import os
    assert not os.path.exists(r.stdout_text.strip())


def test_spec_validation():
    with pytest.raises(ValueError):
        ProcessSpec([], 1)
    with pytest.raises(ValueError):
        ProcessSpec(["x"], 0)
