"""The always-on interpretation cascade.

Ink is interpreted in five ordered stages: input partition, predefined
gestures, text/shape recognition, edit-action reasoning, and affected-code
analysis. Each stage publishes partial results so feedforward can render
before the model answers. A cascade runs against an immutable snapshot and
is driven stepwise, which gives the session a cancellation point between
stages and lets tests interleave ink arbitrarily with stage execution.

Staleness rule: results are tagged (canvas revision, cascade seq, stage) and
the channel only delivers monotonically increasing tags, so once any result
of a newer cascade is seen, nothing from an older one can follow.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field

from . import gestures
from .analysis import outline, related_lines
from .clients import ModelUnavailable, OcrUnavailable
from .ink import (
    Rect,
    SketchGroup,
    Stroke,
    line_span_for_bbox,
    map_point_to_line,
    rect_intersects,
)

DEBOUNCE_MS = 500.0
HISTORY_TAIL = 5

STAGES = ("input", "gestures", "recognition", "reasoning", "analysis")

# Diagnostic kinds users can hit, in the paper's error vocabulary.
CODE_MISMATCH = "code_mismatch"
WRONG_INTERPRETATION = "wrong_interpretation"
WRONG_RECOGNITION = "wrong_recognition"
NO_EDIT_PRODUCED = "no_edit_produced"
WRONG_SCOPE = "wrong_scope"
SYNTAX_ERROR_AFTER_EDIT = "syntax_error_after_edit"
ERROR_KINDS = (
    CODE_MISMATCH,
    WRONG_INTERPRETATION,
    WRONG_RECOGNITION,
    NO_EDIT_PRODUCED,
    WRONG_SCOPE,
    SYNTAX_ERROR_AFTER_EDIT,
)


class AlreadyCommitted(Exception):
    """The interpretation drove a commit; its description is frozen."""


class ConflictingBrushes(Exception):
    """A group mixes mutually exclusive command brushes (add/delete/replace)."""


class Canceled(Exception):
    """Cascade superseded by newer ink; its results are discarded."""


# --- line-range helpers ---------------------------------------------------


def normalize_ranges(ranges, line_count: int | None = None) -> list[tuple[int, int]]:
    """Sort, clamp into the document, and merge overlapping/adjacent ranges."""
    cleaned = []
    for a, b in ranges:
        a, b = int(min(a, b)), int(max(a, b))
        if line_count is not None:
            if a > line_count or b < 1:
                continue
            a, b = max(a, 1), min(b, line_count)
        elif b < 1:
            continue
        else:
            a = max(a, 1)
        cleaned.append((a, b))
    cleaned.sort()
    merged: list[tuple[int, int]] = []
    for a, b in cleaned:
        if merged and a <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def ranges_to_lines(ranges) -> set[int]:
    return {line for a, b in ranges for line in range(a, b + 1)}


def lines_to_ranges(lines) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for line in sorted(set(lines)):
        if out and line == out[-1][1] + 1:
            out[-1] = (out[-1][0], line)
        else:
            out.append((line, line))
    return out


def intersect_ranges(a, b) -> list[tuple[int, int]]:
    return lines_to_ranges(ranges_to_lines(a) & ranges_to_lines(b))


def subtract_ranges(a, b) -> list[tuple[int, int]]:
    return lines_to_ranges(ranges_to_lines(a) - ranges_to_lines(b))


# --- domain types ---------------------------------------------------------


@dataclass
class Interpretation:
    id: str
    revision: int
    group_ids: list[str] = field(default_factory=list)
    recognized_items: list[dict] = field(default_factory=list)
    action: dict = field(
        default_factory=lambda: {"kind": "reference_only", "description": "", "user_edited": False}
    )
    referenced_lines: list[tuple[int, int]] = field(default_factory=list)
    affected_lines: list[tuple[int, int]] = field(default_factory=list)
    related_lines: list[int] = field(default_factory=list)
    stage_status: dict[str, str] = field(
        default_factory=lambda: {s: "pending" for s in STAGES}
    )
    diagnostics: list[str] = field(default_factory=list)
    model_latency: float | None = None
    proposed_full_code: str | None = None
    scene_hash: str | None = None
    decision: dict | None = None  # stage-2 short-circuit: {"kind","stroke_id"}
    committed: bool = False

    @property
    def complete(self) -> bool:
        return all(s != "pending" for s in self.stage_status.values())

    def add_diagnostic(self, kind: str) -> None:
        if kind not in ERROR_KINDS:
            raise ValueError(f"unknown diagnostic {kind!r}")
        if kind not in self.diagnostics:
            self.diagnostics.append(kind)

    def to_dict(self) -> dict:
        # model_latency is volatile and deliberately left off the wire form so
        # logs and replays hash identically.
        return {
            "id": self.id,
            "revision": self.revision,
            "group_ids": list(self.group_ids),
            "recognized_items": [dict(i) for i in self.recognized_items],
            "action": dict(self.action),
            "referenced_lines": [list(r) for r in self.referenced_lines],
            "affected_lines": [list(r) for r in self.affected_lines],
            "related_lines": list(self.related_lines),
            "stage_status": dict(self.stage_status),
            "diagnostics": list(self.diagnostics),
            "proposed_full_code": self.proposed_full_code,
            "scene_hash": self.scene_hash,
            "decision": dict(self.decision) if self.decision else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Interpretation":
        return cls(
            id=d["id"],
            revision=d["revision"],
            group_ids=list(d.get("group_ids", [])),
            recognized_items=[dict(i) for i in d.get("recognized_items", [])],
            action=dict(d["action"]),
            referenced_lines=[tuple(r) for r in d.get("referenced_lines", [])],
            affected_lines=[tuple(r) for r in d.get("affected_lines", [])],
            related_lines=list(d.get("related_lines", [])),
            stage_status=dict(d["stage_status"]),
            diagnostics=list(d.get("diagnostics", [])),
            proposed_full_code=d.get("proposed_full_code"),
            scene_hash=d.get("scene_hash"),
            decision=dict(d["decision"]) if d.get("decision") else None,
        )


def edit_interpretation_text(interp: Interpretation, new_description: str) -> Interpretation:
    """Replace the model's reasoning with the user's wording; commit will
    send the edited text instead of the original."""
    if interp.committed:
        raise AlreadyCommitted(interp.id)
    interp.action["description"] = new_description
    interp.action["user_edited"] = True
    return interp


@dataclass(frozen=True)
class GutterDecoration:
    line: int
    mark: str  # referenced | affected

    def to_dict(self) -> dict:
        return {"line": self.line, "mark": self.mark}


def build_gutter_decorations(interp: Interpretation) -> list[GutterDecoration]:
    """One mark per line; affected wins over referenced on overlap."""
    affected = ranges_to_lines(interp.affected_lines)
    referenced = ranges_to_lines(interp.referenced_lines) - affected
    return [
        GutterDecoration(line, "affected" if line in affected else "referenced")
        for line in sorted(affected | referenced)
    ]


class SessionHistory:
    """Append-only trail of what the model has seen and answered; its tail is
    the prompt context for the next call."""

    def __init__(self):
        self.entries: list[dict] = []

    def append(
        self,
        scene_hash: str | None,
        code_version: str,
        interpretation_id: str | None,
        natural_language_inputs: list[str],
        model_output_digest: str | None,
    ) -> None:
        self.entries.append(
            {
                "scene_hash": scene_hash,
                "code_snapshot_version": code_version,
                "interpretation_id": interpretation_id,
                "natural_language_inputs": list(natural_language_inputs),
                "model_output_digest": model_output_digest,
            }
        )

    def tail(self, n: int = HISTORY_TAIL) -> list[dict]:
        return [dict(e) for e in self.entries[-n:]]


# --- debounce -------------------------------------------------------------


@dataclass
class Debouncer:
    """Deadline tracker for the quiet period after the last ink."""

    delay_ms: float = DEBOUNCE_MS
    deadline: float | None = None

    def poke(self, now: float) -> None:
        self.deadline = now + self.delay_ms

    def cancel(self) -> None:
        self.deadline = None

    def due(self, now: float) -> bool:
        return self.deadline is not None and now >= self.deadline


def schedule_interpretation(debouncer: Debouncer, now: float) -> Debouncer:
    """Reset the debounce deadline to now + delay; the session's tick fires
    the cascade when the deadline passes."""
    debouncer.poke(now)
    return debouncer


# --- publication channel --------------------------------------------------


class FeedforwardChannel:
    """Monotone publication: events are tagged (revision, cascade seq, stage
    index) and anything older than the newest delivered tag is dropped."""

    def __init__(self):
        self._subscribers: list = []
        self._last_tag: tuple = (-1, -1, -1)
        self.dropped = 0

    def subscribe(self, fn) -> None:
        self._subscribers.append(fn)

    def publish(self, tag: tuple, event: dict) -> bool:
        if tag < self._last_tag:
            self.dropped += 1
            return False
        self._last_tag = tag
        for fn in self._subscribers:
            fn(event)
        return True

    def broadcast(self, event: dict) -> None:
        """Deliver unconditionally: authoritative state changes (staged diff,
        run output, highlights) are not subject to the staleness guard."""
        for fn in self._subscribers:
            fn(event)


# --- brush constraints ------------------------------------------------------


@dataclass
class BrushConstraints:
    forced_kind: str | None = None
    clip_affected: list[tuple[int, int]] = field(default_factory=list)
    insertion_line: int | None = None
    extra_referenced: list[tuple[int, int]] = field(default_factory=list)
    conflict: bool = False

    def to_dict(self) -> dict:
        return {
            "forced_kind": self.forced_kind,
            "clip_affected": [list(r) for r in self.clip_affected],
            "insertion_line": self.insertion_line,
            "extra_referenced": [list(r) for r in self.extra_referenced],
        }


def compute_brush_constraints(strokes, transform, line_count) -> BrushConstraints:
    spans: dict[str, list[tuple[int, int]]] = {}
    for stroke in strokes:
        cmd = stroke.command
        if cmd:
            spans.setdefault(cmd, []).append(
                line_span_for_bbox(transform, stroke.bbox(), line_count)
            )
    out = BrushConstraints()
    mutating = [k for k in ("add", "delete", "replace") if k in spans]
    if len(mutating) > 1:
        out.conflict = True
        return out
    if "reference" in spans:
        out.extra_referenced = normalize_ranges(spans["reference"], line_count)
    if mutating:
        kind = mutating[0]
        out.forced_kind = kind
        ranges = normalize_ranges(spans[kind], line_count)
        if kind == "add":
            out.insertion_line = ranges[0][0] if ranges else 1
        else:
            out.clip_affected = ranges
    return out


def apply_brush_constraints(
    interp: Interpretation, strokes, transform, line_count: int
) -> Interpretation:
    """Force the action kind and line scope a command brush demands.

    reference strokes extend referenced_lines and are carved out of
    affected_lines; replace clips affected to the stroked lines; delete
    replaces affected with the stroked lines; add pins affected to the
    insertion point. Mixed mutating brushes raise ConflictingBrushes.
    """
    c = compute_brush_constraints(strokes, transform, line_count)
    if c.conflict:
        raise ConflictingBrushes("group mixes add/delete/replace brushes")
    if c.extra_referenced:
        interp.referenced_lines = normalize_ranges(
            interp.referenced_lines + c.extra_referenced, line_count
        )
        interp.affected_lines = subtract_ranges(interp.affected_lines, c.extra_referenced)
    if c.forced_kind == "replace":
        interp.action["kind"] = "replace"
        interp.affected_lines = (
            intersect_ranges(interp.affected_lines, c.clip_affected) or c.clip_affected
        )
    elif c.forced_kind == "delete":
        interp.action["kind"] = "delete"
        interp.affected_lines = c.clip_affected
    elif c.forced_kind == "add":
        interp.action["kind"] = "add"
        line = c.insertion_line or 1
        interp.affected_lines = [(line, line)]
    return interp


# --- shape heuristics -------------------------------------------------------


def _path_length(points) -> float:
    return sum(
        math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(points, points[1:])
    )


def is_closed_path(stroke: Stroke) -> bool:
    pts = stroke.points
    length = _path_length(pts)
    if length <= 0:
        return False
    gap = math.hypot(pts[-1][0] - pts[0][0], pts[-1][1] - pts[0][1])
    x, y, w, h = stroke.bbox()
    return gap < 0.2 * length and w > 4 and h > 4


def arrow_head(stroke: Stroke):
    """Detects an end barb: a sharp direction reversal in the final third of
    the path. Returns the turn point (the arrow head) or None."""
    pts = [(p[0], p[1]) for p in stroke.points]
    if len(pts) < 3 or is_closed_path(stroke):
        return None
    start = max(1, int(len(pts) * 0.66))
    for i in range(start, len(pts) - 1):
        ax, ay = pts[i][0] - pts[i - 1][0], pts[i][1] - pts[i - 1][1]
        bx, by = pts[i + 1][0] - pts[i][0], pts[i + 1][1] - pts[i][1]
        na, nb = math.hypot(ax, ay), math.hypot(bx, by)
        if na == 0 or nb == 0:
            continue
        cos = (ax * bx + ay * by) / (na * nb)
        if cos < -0.17:  # turn sharper than ~100 degrees
            return pts[i]
    return None


# --- the cascade ------------------------------------------------------------


@dataclass
class CascadeSnapshot:
    """Immutable view a cascade runs against; taken under the session writer."""

    revision: int
    seq: int
    strokes: tuple[Stroke, ...]
    groups: tuple[SketchGroup, ...]
    text: str
    version_id: str
    transform: object
    line_count: int
    staged_pending: bool
    staged_region: tuple[Rect, ...]
    history_tail: list
    user_description: str | None
    scene_factory: object  # () -> Scene, caching lives with the session

    @property
    def pen_strokes(self) -> list[Stroke]:
        return [s for s in self.strokes if s.input_kind == "pen" and not s.is_eraser]


class CascadeRun:
    """Stepwise execution of the five stages over one snapshot."""

    def __init__(self, interp_id, snapshot, model, ocr, channel, templates, clock=None):
        self.snapshot = snapshot
        self.model = model
        self.ocr = ocr
        self.channel = channel
        self.templates = templates
        self.clock = clock or (lambda: time.monotonic() * 1000.0)
        self.interpretation = Interpretation(
            id=interp_id,
            revision=snapshot.revision,
            group_ids=[g.id for g in snapshot.groups],
        )
        self.stage_idx = 0
        self.cancelled = False
        self.model_request: dict | None = None
        self.model_digest: str | None = None

    @property
    def done(self) -> bool:
        return self.stage_idx >= len(STAGES)

    def cancel(self) -> None:
        self.cancelled = True

    def step(self) -> bool:
        """Run the next stage and publish its partial result; True when done."""
        if self.cancelled:
            raise Canceled(self.interpretation.id)
        if self.done:
            return True
        stage = STAGES[self.stage_idx]
        getattr(self, f"_stage_{stage}")()
        if self.interpretation.stage_status[stage] == "pending":
            self.interpretation.stage_status[stage] = "done"
        self.stage_idx += 1
        if self.interpretation.decision is not None and stage == "gestures":
            for later in STAGES[2:]:
                self.interpretation.stage_status[later] = "done"
            self.stage_idx = len(STAGES)
        self._publish(stage)
        return self.done

    def run_all(self) -> Interpretation:
        while not self.step():
            pass
        return self.interpretation

    def _publish(self, stage: str) -> None:
        tag = (self.snapshot.revision, self.snapshot.seq, self.stage_idx)
        self.channel.publish(
            tag,
            {
                "type": "feedforward",
                "revision": self.snapshot.revision,
                "cascade": self.snapshot.seq,
                "stage": stage,
                "interpretation": self.interpretation.to_dict(),
            },
        )

    # stage 1: split pen ink from touch input
    def _stage_input(self):
        if not self.snapshot.pen_strokes:
            self.interpretation.stage_status["input"] = "done"

    # stage 2: predefined gestures, gated on a pending staged diff
    def _stage_gestures(self):
        interp = self.interpretation
        if not self.snapshot.staged_pending or not self.templates:
            return
        for stroke in self.snapshot.pen_strokes:
            if stroke.brush != "freeform":
                continue
            if not any(
                rect_intersects(stroke.bbox(), region)
                for region in self.snapshot.staged_region
            ):
                continue
            try:
                hit = gestures.recognize_unistroke(
                    [(p[0], p[1]) for p in stroke.points], self.templates
                )
            except gestures.DegenerateStroke:
                continue
            if hit is None:
                continue
            name, score = hit
            interp.decision = {
                "kind": "accept" if name == "check" else "reject",
                "stroke_id": stroke.id,
                "score": round(score, 4),
            }
            return

    # stage 3: OCR text plus local closed-shape/arrow heuristics
    def _stage_recognition(self):
        interp = self.interpretation
        text_items: list[dict] = []
        for group in self.snapshot.groups:
            members = [
                s
                for s in self.snapshot.pen_strokes
                if s.id in group.stroke_ids and not is_closed_path(s) and arrow_head(s) is None
            ]
            if not members:
                continue
            try:
                for item in self.ocr.recognize(members):
                    text_items.append(
                        {
                            "kind": "text",
                            "content": item.get("content", ""),
                            "bbox": list(item.get("bbox", group.bbox)),
                            "role": item.get("role", "command"),
                        }
                    )
            except OcrUnavailable:
                interp.stage_status["recognition"] = "failed"
        shape_items: list[dict] = []
        for stroke in self.snapshot.pen_strokes:
            if is_closed_path(stroke):
                shape_items.append(
                    {
                        "kind": "shape",
                        "content": "closed",
                        "bbox": list(stroke.bbox()),
                        "role": "target",
                    }
                )
                continue
            head = arrow_head(stroke)
            if head is not None:
                role = "target"
                head_line = map_point_to_line(
                    self.snapshot.transform, head, self.snapshot.line_count
                )
                for item in text_items:
                    bx, by, bw, bh = item["bbox"]
                    if bx <= head[0] <= bx + bw and by <= head[1] <= by + bh:
                        role = "parameter"
                        break
                else:
                    if head_line is None:
                        role = "target"
                shape_items.append(
                    {
                        "kind": "arrow",
                        "content": "arrow",
                        "bbox": list(stroke.bbox()),
                        "role": role,
                    }
                )
        interp.recognized_items = text_items + shape_items
        # geometric anchor lines are the starting point for context
        anchors = [g.anchor_lines for g in self.snapshot.groups if g.anchor_lines]
        interp.referenced_lines = normalize_ranges(anchors, self.snapshot.line_count)

    # stage 4: model reasoning under brush constraints
    def _stage_reasoning(self):
        interp = self.interpretation
        scene = self.snapshot.scene_factory()
        interp.scene_hash = scene.content_hash
        constraints = compute_brush_constraints(
            self.snapshot.pen_strokes, self.snapshot.transform, self.snapshot.line_count
        )
        request = {
            "scene_svg": scene.svg,
            "scene_hash": scene.content_hash,
            "code": self.snapshot.text,
            "brush_constraints": constraints.to_dict() if not constraints.conflict else None,
            "recognized_items": [dict(i) for i in interp.recognized_items],
            "history": self.snapshot.history_tail,
            "description": self.snapshot.user_description,
        }
        self.model_request = request
        started = self.clock()
        try:
            response = self.model.interpret(request)
        except ModelUnavailable:
            interp.stage_status["reasoning"] = "failed"
            interp.add_diagnostic(NO_EDIT_PRODUCED)
            return
        interp.model_latency = self.clock() - started
        self.model_digest = hashlib.sha256(
            json.dumps(response, sort_keys=True, separators=(",", ":")).encode()
        ).hexdigest()
        if response["recognized_items"]:
            interp.recognized_items = response["recognized_items"]
        interp.action = {
            "kind": response["action"]["kind"],
            "description": response["action"]["description"],
            "user_edited": False,
        }
        interp.referenced_lines = normalize_ranges(
            response["referenced_lines"] or interp.referenced_lines,
            self.snapshot.line_count,
        )
        interp.affected_lines = normalize_ranges(
            response["affected_lines"], self.snapshot.line_count
        )
        interp.proposed_full_code = response.get("proposed_full_code")
        try:
            apply_brush_constraints(
                interp,
                self.snapshot.pen_strokes,
                self.snapshot.transform,
                self.snapshot.line_count,
            )
        except ConflictingBrushes:
            interp.add_diagnostic(WRONG_SCOPE)

    # stage 5: structural context for highlighting
    def _stage_analysis(self):
        interp = self.interpretation
        seeds = ranges_to_lines(interp.affected_lines) | ranges_to_lines(
            interp.referenced_lines
        )
        if seeds:
            root = outline(self.snapshot.text)
            interp.related_lines = sorted(
                related_lines(root, self.snapshot.text, seeds)
            )


def run_cascade(run: CascadeRun) -> Interpretation:
    """Drive a cascade to completion synchronously (the commit path)."""
    return run.run_all()
