"""The frozen end-to-end scenario: a circle around lines 3-5, an arrow out
to the margin, and a handwritten "def", interpreted by primed mock clients
into a two-hunk staged edit.

Both the fixture maker (tests/fixtures/make_golden.py) and the test suite
import this module, so the strokes and expected flow live in exactly one
place. Regenerate the frozen artifacts with:

    python3 tests/fixtures/make_golden.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from inkedit import ManualClock, MockModelClient, MockOcrClient, Session, SessionConfig
from inkedit.clients import stroke_group_hash
from inkedit.ink import Stroke
from inkedit.pipeline import build_gutter_decorations

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN_DIR = FIXTURES / "golden"
RECORDS_DIR = FIXTURES / "records"

GOLDEN_SEED = (
    "values = [3, 1, 4, 1, 5]\n"
    "total = 0\n"
    "for v in values:\n"
    "    total = total + v\n"
    "print(total)\n"
)

GOLDEN_PROPOSED = (
    "values = [3, 1, 4, 1, 5]\n"
    "def add_all(items):\n"
    "    acc = 0\n"
    "    for v in items:\n"
    "        acc = acc + v\n"
    "    return acc\n"
    "total = 0\n"
    "print(add_all(values))\n"
)

GOLDEN_DESCRIPTION = "extract the summing loop into a function"


def circle_stroke() -> Stroke:
    """Closed ellipse around the line 3-5 band (y 42..98 at 20 px lines)."""
    cx, cy, rx, ry = 140.0, 70.0, 130.0, 28.0
    pts = []
    for i in range(40):
        a = 2 * math.pi * i / 40
        pts.append((cx + rx * math.cos(a), cy + ry * math.sin(a), 1000.0 + 10.0 * i))
    return Stroke(id="golden-circle", points=tuple(pts), input_kind="pen", brush="freeform")


def arrow_stroke() -> Stroke:
    """Shaft from the circle's edge toward the margin, with an end barb."""
    pts = []
    for i in range(13):
        t = i / 12
        pts.append((285.0 + 75.0 * t, 70.0 - 30.0 * t, 1500.0 + 10.0 * i))
    pts.append((352.0, 44.0, 1630.0))  # barb: sharp reversal at the tip
    return Stroke(id="golden-arrow", points=tuple(pts), input_kind="pen", brush="freeform")


def def_stroke() -> Stroke:
    """Smooth squiggle standing in for handwritten text (OCR is mocked)."""
    pts = []
    for i in range(20):
        x = 368.0 + 52.0 * i / 19
        y = 30.0 + 10.0 * math.sin(3.0 * math.pi * i / 19)
        pts.append((x, y, 1700.0 + 10.0 * i))
    return Stroke(id="golden-def", points=tuple(pts), input_kind="pen", brush="freeform")


def golden_strokes() -> list[Stroke]:
    return [circle_stroke(), arrow_stroke(), def_stroke()]


def golden_ocr_items() -> list[dict]:
    return [{"content": "def", "bbox": [368.0, 20.0, 52.0, 20.0], "role": "command"}]


def golden_model_response() -> dict:
    return {
        "recognized_items": [],
        "action": {"kind": "replace", "description": GOLDEN_DESCRIPTION},
        "referenced_lines": [[3, 5]],
        "affected_lines": [[2, 5]],
        "proposed_full_code": GOLDEN_PROPOSED,
    }


def build_golden_session(
    model: MockModelClient | None = None,
    ocr: MockOcrClient | None = None,
    log_path: str | None = None,
) -> tuple[Session, ManualClock]:
    clock = ManualClock()
    session = Session(
        config=SessionConfig(),
        clock=clock,
        model=model or MockModelClient(),
        ocr=ocr or MockOcrClient(),
        seed_files={"sums.py": GOLDEN_SEED},
        log_path=log_path,
    )
    return session, clock


def primed_clients() -> tuple[MockModelClient, MockOcrClient]:
    model = MockModelClient()
    ocr = MockOcrClient()
    with open(GOLDEN_DIR / "model.json", encoding="utf-8") as fh:
        for scene_hash, response in json.load(fh).items():
            model.register(scene_hash, response)
    ocr.load_fixture(GOLDEN_DIR / "ocr.json")
    return model, ocr


def sketch_phase(session: Session, clock: ManualClock) -> None:
    """Draw the three strokes and tick until the interpretation lands."""
    for stroke in golden_strokes():
        clock.set(stroke.end_t)
        session.add_stroke(stroke)
    for ms in range(1900, 3005, 5):
        clock.set(float(ms))
        session.tick()
    assert session.fs.last_interpretation is not None, "cascade never completed"


def drive_golden(session: Session, clock: ManualClock) -> dict:
    """Full loop: sketch, commit, accept both hunks, finalize."""
    sketch_phase(session, clock)
    clock.set(3200.0)
    staged = session.commit(t=3200.0)
    staged_at_commit = staged.to_dict()
    interp = session.fs.last_interpretation
    gutter = [d.to_dict() for d in build_gutter_decorations(interp)]
    clock.set(3300.0)
    session.resolve_hunk(0, "accept", t=3300.0)
    clock.set(3350.0)
    session.resolve_hunk(1, "accept", t=3350.0)
    clock.set(3400.0)
    version = session.finalize(t=3400.0)
    return {
        "staged": staged_at_commit,
        "gutter": gutter,
        "final_code": version.text,
        "final_version": version.version_id,
        "highlights": [[h.start_line, h.end_line] for h in session.highlights],
        "scene_hash": interp.scene_hash,
    }


def discover_golden_hashes() -> tuple[str, str]:
    """Unprimed pass that yields the OCR group hash and scene hash the
    fixture files are keyed by."""
    session, clock = build_golden_session()
    sketch_phase(session, clock)
    interp = session.fs.last_interpretation
    group_hash = stroke_group_hash([def_stroke()])
    return group_hash, interp.scene_hash
