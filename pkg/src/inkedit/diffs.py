"""Minimal line diffs: Myers O(ND) edit scripts, hunk grouping, unified output.

The edit script is guaranteed minimal (its insert+delete count equals
``len(a) + len(b) - 2 * LCS(a, b)``), which keeps staged hunks as small as
the proposal allows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

KEEP = "keep"
INSERT = "insert"
DELETE = "delete"


@dataclass(frozen=True)
class EditOp:
    """One step of an edit script.

    ``line`` is the affected text; for KEEP/DELETE it comes from the base
    sequence, for INSERT from the new one.
    """

    op: str
    line: str


def diff_lines(base: list[str], new: list[str]) -> list[EditOp]:
    """Compute a minimal edit script turning ``base`` into ``new``."""
    trace = _forward_trace(base, new)
    script: list[EditOp] = []
    x, y = len(base), len(new)
    for d in range(len(trace) - 1, -1, -1):
        v = trace[d]
        k = x - y
        if k == -d or (k != d and v.get(k - 1, 0) < v.get(k + 1, 0)):
            prev_k = k + 1
        else:
            prev_k = k - 1
        prev_x = v.get(prev_k, 0)
        prev_y = prev_x - prev_k
        while x > prev_x and y > prev_y:
            script.append(EditOp(KEEP, base[x - 1]))
            x -= 1
            y -= 1
        if d > 0:
            if x == prev_x:
                script.append(EditOp(INSERT, new[prev_y]))
            else:
                script.append(EditOp(DELETE, base[prev_x]))
        x, y = prev_x, prev_y
    script.reverse()
    return script


def _forward_trace(a: list[str], b: list[str]) -> list[dict[int, int]]:
    n, m = len(a), len(b)
    v: dict[int, int] = {1: 0}
    trace: list[dict[int, int]] = []
    for d in range(n + m + 1):
        trace.append(dict(v))
        for k in range(-d, d + 1, 2):
            if k == -d or (k != d and v.get(k - 1, 0) < v.get(k + 1, 0)):
                x = v.get(k + 1, 0)
            else:
                x = v.get(k - 1, 0) + 1
            y = x - k
            while x < n and y < m and a[x] == b[y]:
                x += 1
                y += 1
            v[k] = x
            if x >= n and y >= m:
                return trace
    return trace


def edit_distance(script: list[EditOp]) -> int:
    """Number of non-keep steps in a script."""
    return sum(1 for op in script if op.op != KEEP)


def apply_script(base: list[str], script: list[EditOp]) -> list[str]:
    out: list[str] = []
    i = 0
    for step in script:
        if step.op == KEEP:
            out.append(base[i])
            i += 1
        elif step.op == DELETE:
            i += 1
        else:
            out.append(step.line)
    return out


@dataclass
class Hunk:
    """A contiguous change against the base document.

    ``base_start``/``base_end`` are 1-based inclusive line numbers. A pure
    insertion has ``base_end == base_start - 1`` and inserts before
    ``base_start``.
    """

    base_start: int
    base_end: int
    replacement: list[str] = field(default_factory=list)
    state: str = "pending"  # pending | accepted | rejected

    @property
    def is_insertion(self) -> bool:
        return self.base_end < self.base_start

    def base_range(self) -> tuple[int, int]:
        return (self.base_start, self.base_end)

    def to_dict(self) -> dict:
        return {
            "base_start": self.base_start,
            "base_end": self.base_end,
            "replacement": list(self.replacement),
            "state": self.state,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Hunk":
        return cls(d["base_start"], d["base_end"], list(d["replacement"]), d.get("state", "pending"))


def script_to_hunks(script: list[EditOp]) -> list[Hunk]:
    """Group adjacent non-keep ops into hunks (coalescing gap = 0)."""
    hunks: list[Hunk] = []
    base_line = 1
    run_deletes: list[int] = []
    run_inserts: list[str] = []

    def flush() -> None:
        nonlocal run_deletes, run_inserts
        if not run_deletes and not run_inserts:
            return
        if run_deletes:
            hunks.append(Hunk(run_deletes[0], run_deletes[-1], run_inserts))
        else:
            hunks.append(Hunk(base_line, base_line - 1, run_inserts))
        run_deletes = []
        run_inserts = []

    for step in script:
        if step.op == KEEP:
            flush()
            base_line += 1
        elif step.op == DELETE:
            run_deletes.append(base_line)
            base_line += 1
        else:
            run_inserts.append(step.line)
    flush()
    return hunks


def apply_hunks(base: list[str], hunks: list[Hunk], accepted_only: bool = False) -> list[str]:
    """Apply hunks (sorted by base position) to the base lines.

    With ``accepted_only`` hunks whose state is not ``accepted`` are skipped,
    leaving their base lines untouched.
    """
    out: list[str] = []
    cursor = 1  # next base line to copy
    for hunk in hunks:
        start = hunk.base_start
        while cursor < start:
            out.append(base[cursor - 1])
            cursor += 1
        if accepted_only and hunk.state != "accepted":
            continue
        out.extend(hunk.replacement)
        if not hunk.is_insertion:
            cursor = hunk.base_end + 1
    while cursor <= len(base):
        out.append(base[cursor - 1])
        cursor += 1
    return out


def unified_diff(base: list[str], new: list[str], from_name: str = "a", to_name: str = "b", context: int = 3) -> str:
    """Render a standard ---/+++/@@ unified diff of two line sequences."""
    script = diff_lines(base, new)
    if edit_distance(script) == 0:
        return ""
    # Indices of script steps to emit: non-keep runs plus surrounding context.
    keepmask = [step.op == KEEP for step in script]
    include = [False] * len(script)
    for i, is_keep in enumerate(keepmask):
        if not is_keep:
            for j in range(max(0, i - context), min(len(script), i + context + 1)):
                include[j] = True
    out = [f"--- {from_name}", f"+++ {to_name}"]
    i = 0
    base_line = 1
    new_line = 1
    while i < len(script):
        if not include[i]:
            if script[i].op in (KEEP, DELETE):
                base_line += 1
            if script[i].op in (KEEP, INSERT):
                new_line += 1
            i += 1
            continue
        # start of a chunk
        start_base, start_new = base_line, new_line
        body: list[str] = []
        n_base = n_new = 0
        while i < len(script) and include[i]:
            step = script[i]
            if step.op == KEEP:
                body.append(" " + step.line)
                n_base += 1
                n_new += 1
                base_line += 1
                new_line += 1
            elif step.op == DELETE:
                body.append("-" + step.line)
                n_base += 1
                base_line += 1
            else:
                body.append("+" + step.line)
                n_new += 1
                new_line += 1
            i += 1
        a_start = start_base if n_base else start_base - 1
        b_start = start_new if n_new else start_new - 1
        out.append(f"@@ -{a_start},{n_base} +{b_start},{n_new} @@")
        out.extend(body)
    return "\n".join(out) + "\n"
