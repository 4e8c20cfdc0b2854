"""Canvas ink state: strokes, erasure, pen-lift grouping, selection, and the
mapping between canvas pixels and code lines.

Grouping is deterministic from the timestamped stroke log alone: an incoming
stroke seals the open buffer when it starts T_GROUP_MS after the previous
stroke ended, or when its inflated bbox no longer touches the buffer; a timer
closure seals after the same quiet period. Replaying a log reproduces
identical groups byte for byte.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

T_GROUP_MS = 800.0
GROUP_INFLATE_PX = 24.0

BRUSHES = ("freeform", "cmd:reference", "cmd:add", "cmd:delete", "cmd:replace", "eraser")

_COLOR_RE = re.compile(r"#[0-9a-fA-F]{8}\Z")
_INPUT_RE = re.compile(r"(pen|touch:[1-5])\Z")


class MalformedStroke(Exception):
    """Raised for strokes that violate the wire contract."""


# Rects are (x, y, w, h); intersection tests are closed so touching edges count.
Rect = tuple[float, float, float, float]


def rect_from_points(points) -> Rect:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))


def rect_union(a: Rect | None, b: Rect | None) -> Rect | None:
    if a is None:
        return b
    if b is None:
        return a
    x = min(a[0], b[0])
    y = min(a[1], b[1])
    return (x, y, max(a[0] + a[2], b[0] + b[2]) - x, max(a[1] + a[3], b[1] + b[3]) - y)


def rect_inflate(r: Rect, margin: float) -> Rect:
    return (r[0] - margin, r[1] - margin, r[2] + 2 * margin, r[3] + 2 * margin)


def rect_intersects(a: Rect, b: Rect) -> bool:
    return a[0] <= b[0] + b[2] and b[0] <= a[0] + a[2] and a[1] <= b[1] + b[3] and b[1] <= a[1] + a[3]


def rect_contains(outer: Rect, inner: Rect) -> bool:
    return (
        outer[0] <= inner[0]
        and outer[1] <= inner[1]
        and inner[0] + inner[2] <= outer[0] + outer[2]
        and inner[1] + inner[3] <= outer[1] + outer[3]
    )


def _segment_distance(p, a, b) -> float:
    ax, ay = a[0], a[1]
    dx, dy = b[0] - ax, b[1] - ay
    length_sq = dx * dx + dy * dy
    if length_sq == 0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / length_sq))
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_distance(p1, p2, q1, q2) -> float:
    """Minimum distance between segments p1p2 and q1q2 (0 when they cross).

    Touching and collinear-overlap cases fall out of the endpoint checks,
    so only the proper-crossing test is needed on top.
    """
    d1, d2 = _orient(q1, q2, p1), _orient(q1, q2, p2)
    d3, d4 = _orient(p1, p2, q1), _orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return 0.0
    return min(
        _segment_distance(p1, q1, q2),
        _segment_distance(p2, q1, q2),
        _segment_distance(q1, p1, p2),
        _segment_distance(q2, p1, p2),
    )


@dataclass(frozen=True)
class Stroke:
    id: str
    points: tuple[tuple[float, float, float], ...]  # (x px, y px, t ms)
    input_kind: str = "pen"  # "pen" or "touch:N"
    brush: str = "freeform"
    color: str = "#000000FF"
    width: float = 2.0

    def __post_init__(self):
        object.__setattr__(
            self, "points", tuple((float(x), float(y), float(t)) for x, y, t in self.points)
        )
        if not self.points:
            raise MalformedStroke("stroke has no points")
        ts = [p[2] for p in self.points]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise MalformedStroke("timestamps must be non-decreasing")
        if self.brush not in BRUSHES:
            raise MalformedStroke(f"unknown brush {self.brush!r}")
        if not _INPUT_RE.match(self.input_kind):
            raise MalformedStroke(f"unknown input kind {self.input_kind!r}")
        if not _COLOR_RE.match(self.color):
            raise MalformedStroke(f"color must be #RRGGBBAA, got {self.color!r}")
        object.__setattr__(self, "width", float(self.width))
        if not self.width > 0:
            raise MalformedStroke("width must be positive")

    @property
    def start_t(self) -> float:
        return self.points[0][2]

    @property
    def end_t(self) -> float:
        return self.points[-1][2]

    @property
    def is_eraser(self) -> bool:
        return self.brush == "eraser"

    @property
    def command(self) -> str | None:
        """Command-brush kind (reference|add|delete|replace) or None."""
        return self.brush[4:] if self.brush.startswith("cmd:") else None

    def bbox(self) -> Rect:
        return rect_from_points(self.points)

    def to_wire(self) -> dict:
        return {
            "id": self.id,
            "points": [[x, y, t] for x, y, t in self.points],
            "input": self.input_kind,
            "brush": self.brush,
            "color": self.color,
            "width": self.width,
        }

    @classmethod
    def from_wire(cls, obj: dict) -> "Stroke":
        try:
            return cls(
                id=str(obj["id"]),
                points=tuple((p[0], p[1], p[2]) for p in obj["points"]),
                input_kind=obj.get("input", "pen"),
                brush=obj.get("brush", "freeform"),
                color=obj.get("color", "#000000FF"),
                width=obj.get("width", 2.0),
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise MalformedStroke(f"bad stroke object: {exc}") from exc


@dataclass
class SketchGroup:
    id: str
    stroke_ids: list[str]
    bbox: Rect
    anchor_lines: tuple[int, int] | None = None
    closed_at: float | None = None  # None while the buffer is still open

    @property
    def closed(self) -> bool:
        return self.closed_at is not None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "stroke_ids": list(self.stroke_ids),
            "bbox": list(self.bbox),
            "anchor_lines": list(self.anchor_lines) if self.anchor_lines else None,
            "closed_at": self.closed_at,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SketchGroup":
        return cls(
            id=obj["id"],
            stroke_ids=list(obj["stroke_ids"]),
            bbox=tuple(obj["bbox"]),
            anchor_lines=tuple(obj["anchor_lines"]) if obj.get("anchor_lines") else None,
            closed_at=obj.get("closed_at"),
        )


@dataclass(frozen=True)
class CanvasTransform:
    scroll_y: float = 0.0
    zoom: float = 1.0
    line_height: float = 20.0
    gutter_width: float = 0.0
    code_origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        # coerced to float so serialized transforms are byte-stable no matter
        # whether a client sent ints or floats
        for name in ("scroll_y", "zoom", "line_height", "gutter_width"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.zoom > 0:
            raise ValueError("zoom must be positive")
        if not self.line_height > 0:
            raise ValueError("line_height must be positive")
        object.__setattr__(self, "code_origin", tuple(float(v) for v in self.code_origin))

    def to_dict(self) -> dict:
        return {
            "scroll_y": self.scroll_y,
            "zoom": self.zoom,
            "line_height": self.line_height,
            "gutter_width": self.gutter_width,
            "code_origin": list(self.code_origin),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "CanvasTransform":
        return cls(
            scroll_y=obj.get("scroll_y", 0.0),
            zoom=obj.get("zoom", 1.0),
            line_height=obj.get("line_height", 20.0),
            gutter_width=obj.get("gutter_width", 0.0),
            code_origin=tuple(obj.get("code_origin", (0.0, 0.0))),
        )


def map_point_to_line(transform: CanvasTransform, p, line_count: int | None = None) -> int | None:
    """Canvas point -> 1-based code line, or None outside the code region."""
    doc_x = p[0] / transform.zoom
    if doc_x < transform.code_origin[0] - transform.gutter_width:
        return None
    doc_y = p[1] / transform.zoom + transform.scroll_y
    line = math.floor((doc_y - transform.code_origin[1]) / transform.line_height) + 1
    if line < 1:
        return None
    if line_count is not None and line > line_count:
        return None
    return line


def line_band(transform: CanvasTransform, line: int) -> tuple[float, float]:
    """Canvas-space [top, bottom) band of a 1-based line."""
    doc_top = transform.code_origin[1] + (line - 1) * transform.line_height
    top = (doc_top - transform.scroll_y) * transform.zoom
    return (top, top + transform.line_height * transform.zoom)


def line_span_for_bbox(
    transform: CanvasTransform, bbox: Rect, line_count: int | None = None
) -> tuple[int, int]:
    """Inclusive line range under a bbox's vertical extent, clamped into the
    document so margin sketches anchor to the nearest line band."""

    def raw(y: float) -> int:
        doc_y = y / transform.zoom + transform.scroll_y
        return math.floor((doc_y - transform.code_origin[1]) / transform.line_height) + 1

    top = raw(bbox[1])
    bottom = raw(bbox[1] + bbox[3])
    last = max(1, line_count) if line_count is not None else max(1, bottom)
    top = min(max(top, 1), last)
    bottom = min(max(bottom, top), last)
    return (top, bottom)


class Canvas:
    """Single-writer live ink layer for one file.

    revision counts every visible mutation; interpretation staleness is
    decided by comparing revisions, so the counter never goes backwards,
    including across snapshot restores.
    """

    def __init__(self, transform: CanvasTransform | None = None):
        self.transform = transform or CanvasTransform()
        self.strokes: dict[str, Stroke] = {}
        self.order: list[str] = []
        self.groups: list[SketchGroup] = []
        self.buffer: SketchGroup | None = None
        self.revision = 0
        self._group_counter = 0

    # --- stroke lifecycle -------------------------------------------------

    def add_stroke(self, stroke: Stroke, line_count: int | None = None):
        """Store a stroke in the open buffer; returns (stroke_id, sealed_group).

        sealed_group is the previous buffer when this stroke's arrival closed
        it (temporal gap or spatial disjointness), else None.
        """
        if stroke.is_eraser:
            raise MalformedStroke("eraser strokes are not stored; route them to erase_at")
        if stroke.id in self.strokes:
            raise MalformedStroke(f"duplicate stroke id {stroke.id!r}")
        sealed = None
        if self.buffer is not None:
            last_end = max(self.strokes[sid].end_t for sid in self.buffer.stroke_ids)
            gap = stroke.start_t - last_end
            disjoint = not rect_intersects(
                rect_inflate(stroke.bbox(), GROUP_INFLATE_PX), self.buffer.bbox
            )
            if gap >= T_GROUP_MS or disjoint:
                sealed = self._seal(stroke.start_t, line_count)
        self.strokes[stroke.id] = stroke
        self.order.append(stroke.id)
        if self.buffer is None:
            self._group_counter += 1
            self.buffer = SketchGroup(
                id=f"group-{self._group_counter}", stroke_ids=[], bbox=stroke.bbox()
            )
        self.buffer.stroke_ids.append(stroke.id)
        self.buffer.bbox = rect_union(self.buffer.bbox, stroke.bbox())
        self.revision += 1
        return stroke.id, sealed

    def close_group(
        self, now: float, line_count: int | None = None, force: bool = False
    ) -> SketchGroup | None:
        """Seal the open buffer after the quiet period (or unconditionally
        when force is set, e.g. at commit time)."""
        if self.buffer is None:
            return None
        last_end = max(self.strokes[sid].end_t for sid in self.buffer.stroke_ids)
        if force or now - last_end >= T_GROUP_MS:
            return self._seal(now, line_count)
        return None

    def _seal(self, closed_at: float, line_count: int | None) -> SketchGroup:
        group = self.buffer
        self.buffer = None
        group.closed_at = closed_at
        group.anchor_lines = line_span_for_bbox(self.transform, group.bbox, line_count)
        self.groups.append(group)
        return group

    def erase_at(self, eraser_path, radius: float, line_count: int | None = None) -> list[str]:
        """Remove every stroke whose polyline passes within radius of any
        eraser point; shrink or delete the containing groups."""
        if not radius > 0:
            raise ValueError("radius must be positive")
        removed = [
            sid for sid in self.order if self._hit(self.strokes[sid], eraser_path, radius)
        ]
        for sid in removed:
            self._drop_stroke(sid, line_count)
        if removed:
            self.revision += 1
        return removed

    @staticmethod
    def _hit(stroke: Stroke, eraser_path, radius: float) -> bool:
        pts = stroke.points
        segments = list(zip(pts, pts[1:])) or [(pts[0], pts[0])]
        path = list(eraser_path)
        sweeps = list(zip(path, path[1:])) or [(path[0], path[0])]
        return any(
            _segments_distance(e1, e2, a, b) <= radius
            for e1, e2 in sweeps
            for a, b in segments
        )

    def remove_stroke(self, stroke_id: str, line_count: int | None = None) -> None:
        """Drop one stroke (e.g. a stroke consumed as a check/cross gesture)."""
        if stroke_id in self.strokes:
            self._drop_stroke(stroke_id, line_count)
            self.revision += 1

    def _drop_stroke(self, stroke_id: str, line_count: int | None) -> None:
        del self.strokes[stroke_id]
        self.order.remove(stroke_id)
        for holder in self.groups + ([self.buffer] if self.buffer else []):
            if stroke_id in holder.stroke_ids:
                holder.stroke_ids.remove(stroke_id)
                if holder.stroke_ids:
                    holder.bbox = rect_from_points(
                        [
                            p
                            for sid in holder.stroke_ids
                            for p in self.strokes[sid].points
                        ]
                    )
                    if holder.closed:
                        holder.anchor_lines = line_span_for_bbox(
                            self.transform, holder.bbox, line_count
                        )
                elif holder is self.buffer:
                    self.buffer = None
                else:
                    self.groups.remove(holder)
                break

    def clear_groups(self, group_ids) -> list[str]:
        """Remove whole groups and their strokes (sketches consumed by an
        accepted edit)."""
        wanted = set(group_ids)
        removed_strokes: list[str] = []
        for group in [g for g in self.groups if g.id in wanted]:
            for sid in list(group.stroke_ids):
                removed_strokes.append(sid)
                del self.strokes[sid]
                self.order.remove(sid)
            self.groups.remove(group)
        if self.buffer is not None and self.buffer.id in wanted:
            for sid in list(self.buffer.stroke_ids):
                removed_strokes.append(sid)
                del self.strokes[sid]
                self.order.remove(sid)
            self.buffer = None
        if removed_strokes:
            self.revision += 1
        return removed_strokes

    # --- queries ----------------------------------------------------------

    def select_items(self, drag_rect: Rect) -> dict:
        """Strokes whose bbox intersects the rect, plus sealed groups fully
        contained in it."""
        if not (drag_rect[2] > 0 and drag_rect[3] > 0):
            raise ValueError("drag_rect must have positive area")
        strokes = [
            sid for sid in self.order if rect_intersects(self.strokes[sid].bbox(), drag_rect)
        ]
        groups = [g.id for g in self.groups if rect_contains(drag_rect, g.bbox)]
        return {"strokes": strokes, "groups": groups}

    def live_strokes(self) -> list[Stroke]:
        return [self.strokes[sid] for sid in self.order]

    def is_empty(self) -> bool:
        return not self.order

    def all_groups(self, line_count: int | None = None) -> list[SketchGroup]:
        """Sealed groups plus a provisional view of the open buffer.

        The provisional entry keeps the buffer's stable id so interpretations
        can reference it before and after sealing.
        """
        out = [
            SketchGroup(g.id, list(g.stroke_ids), g.bbox, g.anchor_lines, g.closed_at)
            for g in self.groups
        ]
        if self.buffer is not None:
            out.append(
                SketchGroup(
                    self.buffer.id,
                    list(self.buffer.stroke_ids),
                    self.buffer.bbox,
                    line_span_for_bbox(self.transform, self.buffer.bbox, line_count),
                    None,
                )
            )
        return out

    def set_transform(self, transform: CanvasTransform) -> None:
        self.transform = transform
        self.revision += 1

    # --- snapshots (undo/redo moves sketches together with code) ----------

    def snapshot(self) -> dict:
        return {
            "strokes": [self.strokes[sid].to_wire() for sid in self.order],
            "groups": [g.to_dict() for g in self.groups],
            "buffer": self.buffer.to_dict() if self.buffer else None,
            "group_counter": self._group_counter,
            "transform": self.transform.to_dict(),
        }

    def restore(self, snap: dict) -> None:
        strokes = [Stroke.from_wire(obj) for obj in snap["strokes"]]
        self.strokes = {s.id: s for s in strokes}
        self.order = [s.id for s in strokes]
        self.groups = [SketchGroup.from_dict(obj) for obj in snap["groups"]]
        self.buffer = SketchGroup.from_dict(snap["buffer"]) if snap.get("buffer") else None
        self._group_counter = snap.get("group_counter", len(self.groups))
        self.transform = CanvasTransform.from_dict(snap["transform"])
        self.revision += 1
