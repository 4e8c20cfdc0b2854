"""Immutable document versions, staged edit sets, and linear undo/redo.

A staged edit set holds the minimal hunks between the current version and a
proposed text; the user resolves each hunk, then ``finalize`` folds the
accepted subset into a new version. Sketch snapshots travel with versions so
undo restores ink and code together.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

from .diffs import Hunk, apply_hunks, diff_lines, edit_distance, script_to_hunks, unified_diff


class AlreadyResolved(Exception):
    pass


class NoSuchHunk(Exception):
    pass


class PendingHunksRemain(Exception):
    pass


class NothingToUndo(Exception):
    pass


class NothingToRedo(Exception):
    pass


def split_text(text: str) -> list[str]:
    return text.split("\n")


def join_lines(lines: list[str]) -> str:
    return "\n".join(lines)


@dataclass(frozen=True)
class DocumentVersion:
    version_id: str
    text: str
    parent: Optional[str]
    provenance: str  # interpretation id, "manual", or "initial"

    def line_count(self) -> int:
        return len(split_text(self.text))


@dataclass
class TransientHighlight:
    start_line: int
    end_line: int
    expires_at: float

    def active(self, now: float) -> bool:
        return now < self.expires_at


@dataclass
class StagedEditSet:
    base_version: str
    proposed_text: str
    hunks: list[Hunk]
    provenance: str
    finalized_version: Optional[str] = None

    @property
    def pending(self) -> list[int]:
        return [i for i, h in enumerate(self.hunks) if h.state == "pending"]

    def resolve(self, index: int, decision: str) -> None:
        if index < 0 or index >= len(self.hunks):
            raise NoSuchHunk(f"hunk {index} of {len(self.hunks)}")
        if decision not in ("accept", "reject"):
            raise ValueError(f"bad decision {decision!r}")
        hunk = self.hunks[index]
        if hunk.state != "pending":
            raise AlreadyResolved(f"hunk {index} already {hunk.state}")
        hunk.state = "accepted" if decision == "accept" else "rejected"

    def accept_all(self) -> None:
        for h in self.hunks:
            if h.state == "pending":
                h.state = "accepted"

    def reject_all(self) -> None:
        for h in self.hunks:
            if h.state == "pending":
                h.state = "rejected"

    def any_accepted(self) -> bool:
        return any(h.state == "accepted" for h in self.hunks)

    def resolved_text(self, base_text: str) -> str:
        lines = apply_hunks(split_text(base_text), self.hunks, accepted_only=True)
        return join_lines(lines)

    def to_dict(self) -> dict:
        return {
            "base_version": self.base_version,
            "proposed_text": self.proposed_text,
            "hunks": [h.to_dict() for h in self.hunks],
            "provenance": self.provenance,
            "finalized_version": self.finalized_version,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StagedEditSet":
        return cls(
            base_version=d["base_version"],
            proposed_text=d["proposed_text"],
            hunks=[Hunk.from_dict(h) for h in d["hunks"]],
            provenance=d["provenance"],
            finalized_version=d.get("finalized_version"),
        )

    def unified(self, base_text: str) -> str:
        return unified_diff(split_text(base_text), split_text(self.proposed_text))


def stage_edits(current: DocumentVersion, proposed_text: str, provenance: str) -> StagedEditSet:
    """Build a staged edit set of minimal hunks against ``current``.

    An empty diff yields a set with zero hunks; the caller records the
    missing-edit diagnostic on the owning interpretation.
    """
    script = diff_lines(split_text(current.text), split_text(proposed_text))
    hunks = script_to_hunks(script) if edit_distance(script) else []
    return StagedEditSet(current.version_id, proposed_text, hunks, provenance)


class VersionHistory:
    """Version tree with a linear undo/redo path.

    ``snapshot_for`` carries the serialized sketch layer captured when each
    version became current, so undo/redo moves ink and code together.
    """

    def __init__(self, initial_text: str, initial_snapshot: Optional[dict] = None):
        self._versions: dict[str, DocumentVersion] = {}
        self._counter = 0
        root = self._new_version(initial_text, None, "initial")
        self._current = root.version_id
        self._redo: list[str] = []
        self.snapshot_for: dict[str, Optional[dict]] = {root.version_id: initial_snapshot}

    def _new_version(self, text: str, parent: Optional[str], provenance: str) -> DocumentVersion:
        self._counter += 1
        version = DocumentVersion(f"v{self._counter}", text, parent, provenance)
        self._versions[version.version_id] = version
        return version

    @property
    def current(self) -> DocumentVersion:
        return self._versions[self._current]

    def get(self, version_id: str) -> DocumentVersion:
        return self._versions[version_id]

    def has(self, version_id: str) -> bool:
        return version_id in self._versions

    def all_versions(self) -> list[DocumentVersion]:
        return [self._versions[k] for k in sorted(self._versions, key=lambda v: int(v[1:]))]

    def commit_text(self, text: str, provenance: str, snapshot: Optional[dict] = None) -> DocumentVersion:
        version = self._new_version(text, self._current, provenance)
        self._current = version.version_id
        self._redo.clear()  # linear redo: a new edit supersedes the redo branch
        self.snapshot_for[version.version_id] = snapshot
        return version

    def can_undo(self) -> bool:
        return self.current.parent is not None

    def can_redo(self) -> bool:
        return bool(self._redo)

    def undo(self) -> DocumentVersion:
        parent = self.current.parent
        if parent is None:
            raise NothingToUndo("at initial version")
        self._redo.append(self._current)
        self._current = parent
        return self.current

    def redo(self) -> DocumentVersion:
        if not self._redo:
            raise NothingToRedo("no version to redo")
        self._current = self._redo.pop()
        return self.current

    def state_digest(self) -> str:
        payload = {
            "current": self._current,
            "versions": [
                {
                    "id": v.version_id,
                    "text": v.text,
                    "parent": v.parent,
                    "provenance": v.provenance,
                }
                for v in self.all_versions()
            ],
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def finalize(
    history: VersionHistory,
    staged: StagedEditSet,
    snapshot: Optional[dict] = None,
) -> DocumentVersion:
    """Fold resolved hunks into a new version (or collapse to base).

    Re-finalizing an already finalized set returns the recorded version, so
    at-least-once delivery of a finalize request is safe.
    """
    if staged.finalized_version is not None:
        return history.get(staged.finalized_version)
    if staged.pending:
        raise PendingHunksRemain(f"{len(staged.pending)} hunks still pending")
    base = history.get(staged.base_version)
    if not staged.any_accepted():
        staged.finalized_version = base.version_id
        return base
    text = staged.resolved_text(base.text)
    version = history.commit_text(text, staged.provenance, snapshot)
    staged.finalized_version = version.version_id
    return version


def changed_ranges(base_text: str, new_text: str) -> list[tuple[int, int]]:
    """Inclusive line ranges in ``new_text`` that differ from ``base_text``."""
    script = diff_lines(split_text(base_text), split_text(new_text))
    ranges: list[tuple[int, int]] = []
    new_line = 1
    run_start: Optional[int] = None
    for step in script:
        if step.op == "keep":
            if run_start is not None:
                ranges.append((run_start, new_line - 1))
                run_start = None
            new_line += 1
        elif step.op == "insert":
            if run_start is None:
                run_start = new_line
            new_line += 1
        else:  # delete: mark the position in the new text
            if run_start is None:
                run_start = min(new_line, len(split_text(new_text)))
                ranges.append((run_start, run_start))
                run_start = None
    if run_start is not None:
        ranges.append((run_start, new_line - 1))
    merged: list[tuple[int, int]] = []
    for start, end in sorted(ranges):
        if merged and start <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(end, merged[-1][1]))
        else:
            merged.append((start, end))
    return merged
