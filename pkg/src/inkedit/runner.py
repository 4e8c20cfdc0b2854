"""Runs the current code version in a throwaway subprocess.

Each run gets a fresh directory containing only code.py; the process runs
with that directory as cwd, gets killed at the timeout, and any image files
it leaves behind are harvested for the console. Harvest is a directory scan
rather than display hooking so it works with any interpreter.
"""

from __future__ import annotations

import base64
import shutil
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_TIMEOUT_MS = 10_000
DEFAULT_MAX_OUTPUT = 1 << 20  # 1 MiB per stream

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".gif", ".bmp", ".svg")

_SYNTAX_MARKERS = ("SyntaxError", "IndentationError", "TabError")


class LaunchFailure(Exception):
    """The configured interpreter binary could not be spawned."""


@dataclass(frozen=True)
class RunLimits:
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    max_output_bytes: int = DEFAULT_MAX_OUTPUT

    def __post_init__(self):
        if self.timeout_ms <= 0 or self.max_output_bytes <= 0:
            raise ValueError("limits must be positive")


@dataclass
class RunResult:
    stdout: str
    stderr: str
    images: list[tuple[str, bytes]] = field(default_factory=list)
    exit: int | str = 0  # status code, "timeout", or "launch-failure"
    duration_ms: float = 0.0

    @property
    def is_syntax_failure(self) -> bool:
        """True when the run died on a parse/compile error of the edited code."""
        if self.exit in (0, "timeout", "launch-failure"):
            return False
        return any(marker in self.stderr for marker in _SYNTAX_MARKERS)

    def to_dict(self) -> dict:
        return {
            "stdout": self.stdout,
            "stderr": self.stderr,
            "images": [
                {"format": fmt, "data": base64.b64encode(data).decode("ascii")}
                for fmt, data in self.images
            ],
            "exit": self.exit,
            "duration_ms": self.duration_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunResult":
        return cls(
            stdout=d["stdout"],
            stderr=d["stderr"],
            images=[(i["format"], base64.b64decode(i["data"])) for i in d.get("images", [])],
            exit=d["exit"],
            duration_ms=d.get("duration_ms", 0.0),
        )


class Runner:
    """Executes code versions; at most one run per session at a time."""

    def __init__(self, cmd: list[str] | None = None, workdir: str | None = None):
        self.cmd = list(cmd) if cmd else [sys.executable]
        self.workdir = workdir

    def execute(self, version, limits: RunLimits | None = None) -> RunResult:
        limits = limits or RunLimits()
        text = getattr(version, "text", version)
        run_dir = Path(tempfile.mkdtemp(prefix="run-", dir=self.workdir))
        try:
            code_path = run_dir / "code.py"
            code_path.write_text(text, encoding="utf-8")
            started = time.monotonic()
            try:
                proc = subprocess.Popen(
                    self.cmd + ["code.py"],
                    cwd=run_dir,
                    stdout=subprocess.PIPE,
                    stderr=subprocess.PIPE,
                )
            except (FileNotFoundError, PermissionError) as exc:
                raise LaunchFailure(f"cannot spawn {self.cmd[0]!r}: {exc}") from exc
            timed_out = False
            try:
                out, err = proc.communicate(timeout=limits.timeout_ms / 1000.0)
            except subprocess.TimeoutExpired:
                timed_out = True
                proc.kill()
                out, err = proc.communicate()
            duration = (time.monotonic() - started) * 1000.0
            cap = limits.max_output_bytes
            stdout = out[:cap].decode("utf-8", errors="replace")
            stderr = err[:cap].decode("utf-8", errors="replace")
            return RunResult(
                stdout=stdout,
                stderr=stderr,
                images=self._harvest(run_dir),
                exit="timeout" if timed_out else proc.returncode,
                duration_ms=duration,
            )
        finally:
            shutil.rmtree(run_dir, ignore_errors=True)

    @staticmethod
    def _harvest(run_dir: Path) -> list[tuple[str, bytes]]:
        images = []
        for path in sorted(run_dir.iterdir()):
            if path.suffix.lower() in IMAGE_EXTENSIONS and path.is_file():
                images.append((path.suffix.lower().lstrip("."), path.read_bytes()))
        return images
