"""Subprocess runner: output capture, timeout, image harvest, failure modes."""

import sys
import time

import pytest

from inkedit.runner import LaunchFailure, RunLimits, Runner, RunResult


def run(code, **kw):
    return Runner().execute(code, RunLimits(**kw) if kw else None)


def test_simple_print_captures_stdout():
    result = run("print(1 + 1)\n")
    assert result.stdout == "2\n"
    assert result.stderr == ""
    assert result.exit == 0
    assert result.duration_ms > 0


def test_stderr_and_exit_code_surface():
    result = run("import sys\nsys.stderr.write('warn\\n')\nsys.exit(3)\n")
    assert result.stderr == "warn\n"
    assert result.exit == 3


def test_timeout_kills_the_process():
    started = time.monotonic()
    result = run("import time\nwhile True: time.sleep(0.1)\n", timeout_ms=700)
    elapsed = time.monotonic() - started
    assert result.exit == "timeout"
    assert elapsed < 5.0  # killed promptly, not left to linger


def test_output_is_capped():
    result = run("print('x' * 100000)\n", max_output_bytes=512)
    assert len(result.stdout.encode()) <= 512


def test_image_files_are_harvested():
    code = (
        "with open('plot.png', 'wb') as fh:\n"
        "    fh.write(b'\\x89PNG\\r\\n\\x1a\\nfake')\n"
        "with open('notes.txt', 'w') as fh:\n"
        "    fh.write('not an image')\n"
    )
    result = run(code)
    assert len(result.images) == 1
    fmt, data = result.images[0]
    assert fmt == "png"
    assert data.startswith(b"\x89PNG")


def test_multiple_images_come_back_in_name_order():
    code = (
        "for name in ('b.png', 'a.png'):\n"
        "    with open(name, 'wb') as fh:\n"
        "        fh.write(name.encode())\n"
    )
    result = run(code)
    assert [d for _, d in result.images] == [b"a.png", b"b.png"]


def test_runs_are_isolated_from_each_other():
    first = run("with open('marker.png', 'wb') as fh:\n    fh.write(b'x')\n")
    assert len(first.images) == 1
    second = run("print('clean')\n")
    assert second.images == []


def test_syntax_error_is_flagged():
    result = run("def broken(:\n    pass\n")
    assert result.exit not in (0, "timeout")
    assert result.is_syntax_failure
    assert "SyntaxError" in result.stderr


def test_runtime_error_is_not_a_syntax_failure():
    result = run("raise RuntimeError('boom')\n")
    assert result.exit != 0
    assert not result.is_syntax_failure


def test_timeout_is_never_a_syntax_failure():
    result = RunResult(stdout="", stderr="SyntaxError mentioned in output", exit="timeout")
    assert not result.is_syntax_failure


def test_launch_failure_raises():
    runner = Runner(cmd=["/nonexistent/interpreter-xyz"])
    with pytest.raises(LaunchFailure):
        runner.execute("print(1)\n")


def test_version_objects_with_text_attribute_are_accepted():
    class FakeVersion:
        text = "print('via version')\n"

    result = Runner().execute(FakeVersion())
    assert result.stdout == "via version\n"


def test_result_dict_roundtrip_keeps_images():
    result = RunResult(stdout="a", stderr="b", images=[("png", b"\x01\x02")], exit=0)
    back = RunResult.from_dict(result.to_dict())
    assert back.stdout == "a" and back.images == [("png", b"\x01\x02")]


def test_limits_validate():
    with pytest.raises(ValueError):
        RunLimits(timeout_ms=0)
    with pytest.raises(ValueError):
        RunLimits(max_output_bytes=-1)


def test_custom_command_is_used():
    runner = Runner(cmd=[sys.executable, "-O"])
    result = runner.execute("assert False\nprint('optimized away')\n")
    assert result.stdout == "optimized away\n"
