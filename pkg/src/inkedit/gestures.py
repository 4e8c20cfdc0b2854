"""Unistroke recognition (check/cross) and multi-touch gesture classification.

The unistroke path follows the classic template-matching pipeline: resample
to 64 points, rotate the indicative angle to zero, scale into a 250-unit
reference square, translate the centroid to the origin, then compare against
templates with a golden-section search over rotations in +/-45 degrees.
Scaling is uniform (largest bounding-box side maps to 250) so normalization
is idempotent and degenerate 1-D strokes stay well behaved.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

RESAMPLE_COUNT = 64
SQUARE_SIZE = 250.0
HALF_DIAGONAL = 0.5 * math.sqrt(2 * SQUARE_SIZE * SQUARE_SIZE)
ANGLE_RANGE = math.radians(45.0)
ANGLE_PRECISION = math.radians(2.0)
PHI = 0.5 * (-1.0 + math.sqrt(5.0))
ACCEPT_THRESHOLD = 0.80

DOUBLE_TAP_WINDOW_MS = 350.0
TAP_MAX_CONTACT_MS = 200.0
LONGPRESS_MS = 350.0
MOVE_SLOP_PX = 8.0


class DegenerateStroke(Exception):
    """Raised when all points of a stroke coincide."""


Point = tuple[float, float]


def _distance(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def _path_length(points: list[Point]) -> float:
    return sum(_distance(points[i - 1], points[i]) for i in range(1, len(points)))


def _centroid(points: list[Point]) -> Point:
    n = len(points)
    return (sum(p[0] for p in points) / n, sum(p[1] for p in points) / n)


def _bbox(points: list[Point]) -> tuple[float, float, float, float]:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))


def _resample(points: list[Point], n: int = RESAMPLE_COUNT) -> list[Point]:
    interval = _path_length(points) / (n - 1)
    if interval <= 0:
        raise DegenerateStroke("stroke has zero path length")
    src = list(points)
    out: list[Point] = [src[0]]
    accumulated = 0.0
    i = 1
    while i < len(src):
        d = _distance(src[i - 1], src[i])
        if accumulated + d >= interval and d > 0:
            t = (interval - accumulated) / d
            q = (
                src[i - 1][0] + t * (src[i][0] - src[i - 1][0]),
                src[i - 1][1] + t * (src[i][1] - src[i - 1][1]),
            )
            out.append(q)
            src.insert(i, q)
            accumulated = 0.0
        else:
            accumulated += d
        i += 1
    while len(out) < n:
        out.append(src[-1])
    return out[:n]


def _rotate_by(points: list[Point], radians: float) -> list[Point]:
    cx, cy = _centroid(points)
    cos = math.cos(radians)
    sin = math.sin(radians)
    return [
        (
            (p[0] - cx) * cos - (p[1] - cy) * sin + cx,
            (p[0] - cx) * sin + (p[1] - cy) * cos + cy,
        )
        for p in points
    ]


def _rotate_to_zero(points: list[Point]) -> list[Point]:
    cx, cy = _centroid(points)
    angle = math.atan2(cy - points[0][1], cx - points[0][0])
    return _rotate_by(points, -angle)


def _scale_to_square(points: list[Point]) -> list[Point]:
    _, _, w, h = _bbox(points)
    side = max(w, h)
    if side <= 0:
        raise DegenerateStroke("stroke has no spatial extent")
    factor = SQUARE_SIZE / side
    return [(p[0] * factor, p[1] * factor) for p in points]


def _translate_to_origin(points: list[Point]) -> list[Point]:
    cx, cy = _centroid(points)
    return [(p[0] - cx, p[1] - cy) for p in points]


def normalize_stroke(points: list[Point]) -> list[Point]:
    """Normalize raw points into 64 comparable template points."""
    if len(points) < 2 or all(p == points[0] for p in points):
        raise DegenerateStroke("need at least 2 distinct points")
    out = _resample([(float(x), float(y)) for x, y in points])
    out = _rotate_to_zero(out)
    out = _scale_to_square(out)
    return _translate_to_origin(out)


def _path_distance(a: list[Point], b: list[Point]) -> float:
    return sum(_distance(p, q) for p, q in zip(a, b)) / len(a)


def _distance_at_angle(points: list[Point], template: list[Point], radians: float) -> float:
    return _path_distance(_rotate_by(points, radians), template)


def _distance_at_best_angle(points: list[Point], template: list[Point]) -> float:
    lo, hi = -ANGLE_RANGE, ANGLE_RANGE
    x1 = PHI * lo + (1 - PHI) * hi
    f1 = _distance_at_angle(points, template, x1)
    x2 = (1 - PHI) * lo + PHI * hi
    f2 = _distance_at_angle(points, template, x2)
    while abs(hi - lo) > ANGLE_PRECISION:
        if f1 < f2:
            hi = x2
            x2, f2 = x1, f1
            x1 = PHI * lo + (1 - PHI) * hi
            f1 = _distance_at_angle(points, template, x1)
        else:
            lo = x1
            x1, f1 = x2, f2
            x2 = (1 - PHI) * lo + PHI * hi
            f2 = _distance_at_angle(points, template, x2)
    return min(f1, f2)


@dataclass(frozen=True)
class UnistrokeTemplate:
    name: str
    points: tuple[Point, ...]
    rejector: bool = False

    @classmethod
    def from_raw(
        cls, name: str, raw_points: list[Point], rejector: bool = False
    ) -> "UnistrokeTemplate":
        return cls(name, tuple(normalize_stroke(raw_points)), rejector)


def load_templates(path=None) -> list[UnistrokeTemplate]:
    """Load raw templates from a JSON file and normalize them.

    Defaults to the bundled set: check and cross in both drawing directions,
    plus rejector shapes (line, arc). Rejectors never fire a gesture; they
    exist to win the nearest-template contest for smooth or 1-D strokes that
    would otherwise score above threshold against the check.
    """
    if path is None:
        text = resources.files("inkedit").joinpath("templates/gesture_templates.json").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    entries = json.loads(text)
    return [
        UnistrokeTemplate.from_raw(
            e["name"], [tuple(p) for p in e["points"]], e.get("rejector", False)
        )
        for e in entries
    ]


def recognize_unistroke(
    points: list[Point],
    templates: list[UnistrokeTemplate],
    threshold: float = ACCEPT_THRESHOLD,
) -> tuple[str, float] | None:
    """Match a stroke against templates; returns (name, score) or None.

    Score is ``1 - d / half_diagonal`` for the best template at its best
    rotation; matches below ``threshold`` are rejected.
    """
    candidate = normalize_stroke(points)
    best = None
    best_distance = math.inf
    for template in templates:
        d = _distance_at_best_angle(candidate, list(template.points))
        if d < best_distance:
            best_distance = d
            best = template
    if best is None or best.rejector:
        return None
    score = 1.0 - best_distance / HALF_DIAGONAL
    if score < threshold:
        return None
    return (best.name, score)


# --- multi-touch gesture classification ---------------------------------


@dataclass(frozen=True)
class TouchSample:
    """One raw touch frame: position of one finger at one time."""

    finger: int
    x: float
    y: float
    t: float
    phase: str  # down | move | up


@dataclass
class GestureEvent:
    kind: str  # pan | undo | redo | select_canvas | select_code | none
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "payload": dict(self.payload)}


@dataclass
class _Contact:
    finger: int
    points: list[tuple[float, float, float]]

    @property
    def down_t(self) -> float:
        return self.points[0][2]

    @property
    def up_t(self) -> float:
        return self.points[-1][2]

    @property
    def duration(self) -> float:
        return self.up_t - self.down_t

    def travel(self) -> float:
        return max(
            math.hypot(x - self.points[0][0], y - self.points[0][1]) for x, y, _ in self.points
        )

    def hold_before_move(self) -> float:
        """Time from touch-down until the finger first moves past the slop."""
        x0, y0, t0 = self.points[0]
        for x, y, t in self.points:
            if math.hypot(x - x0, y - y0) > MOVE_SLOP_PX:
                return t - t0
        return self.duration

    def rect(self) -> tuple[float, float, float, float]:
        xs = [p[0] for p in self.points]
        ys = [p[1] for p in self.points]
        return (min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))


def _contacts(samples: list[TouchSample]) -> list[_Contact]:
    by_finger: dict[int, _Contact] = {}
    order: list[_Contact] = []
    for s in sorted(samples, key=lambda s: (s.t, s.finger)):
        if s.finger not in by_finger or s.phase == "down":
            contact = _Contact(s.finger, [])
            by_finger[s.finger] = contact
            order.append(contact)
        by_finger[s.finger].points.append((s.x, s.y, s.t))
    return order


def _tap_clusters(contacts: list[_Contact]) -> list[list[_Contact]]:
    """Group contacts that overlap in time into simultaneous clusters."""
    clusters: list[list[_Contact]] = []
    for c in sorted(contacts, key=lambda c: c.down_t):
        if clusters and c.down_t <= max(x.up_t for x in clusters[-1]):
            clusters[-1].append(c)
        else:
            clusters.append([c])
    return clusters


def classify_touch_gesture(samples: list[TouchSample]) -> GestureEvent:
    """Classify a complete touch sequence into a system gesture.

    Two-finger drag pans; two-/three-finger double-taps undo/redo; a
    one-finger drag selects canvas items unless preceded by a long press,
    which selects code instead. Anything else is ``none``.
    """
    contacts = _contacts(samples)
    if not contacts:
        return GestureEvent("none")
    clusters = _tap_clusters(contacts)
    max_fingers = max(len(cl) for cl in clusters)

    if max_fingers in (2, 3):
        taps = [
            cl
            for cl in clusters
            if len(cl) == max_fingers and all(c.duration < TAP_MAX_CONTACT_MS for c in cl)
        ]
        if len(taps) >= 2:
            gap = taps[1][0].down_t - max(c.up_t for c in taps[0])
            if gap < DOUBLE_TAP_WINDOW_MS:
                return GestureEvent("undo" if max_fingers == 2 else "redo")
        if max_fingers == 2 and len(clusters) == 1:
            moved = [c for c in clusters[0] if c.travel() > MOVE_SLOP_PX]
            if moved:
                dx = sum(c.points[-1][0] - c.points[0][0] for c in moved) / len(moved)
                dy = sum(c.points[-1][1] - c.points[0][1] for c in moved) / len(moved)
                return GestureEvent("pan", {"dx": dx, "dy": dy})
        return GestureEvent("none")

    if max_fingers == 1 and len(clusters) == 1:
        contact = clusters[0][0]
        if contact.travel() <= MOVE_SLOP_PX:
            return GestureEvent("none")
        kind = "select_code" if contact.hold_before_move() >= LONGPRESS_MS else "select_canvas"
        x, y, w, h = contact.rect()
        return GestureEvent(kind, {"rect": [x, y, w, h]})

    return GestureEvent("none")
