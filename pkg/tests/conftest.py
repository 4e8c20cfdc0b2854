import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from inkedit import ManualClock, MockModelClient, MockOcrClient, Session, SessionConfig
from inkedit.clients import validate_model_response
from inkedit.ink import Stroke


class ScriptedModel:
    """Model stand-in that returns one canned response for every request and
    records what it was asked."""

    def __init__(self, response: dict):
        validate_model_response(response)
        self.response = response
        self.calls: list[dict] = []

    def interpret(self, request: dict) -> dict:
        self.calls.append(request)
        import json

        return json.loads(json.dumps(self.response))


def make_response(
    proposed: str | None = None,
    kind: str = "replace",
    description: str = "edit",
    referenced=(),
    affected=(),
    recognized=(),
) -> dict:
    response = {
        "recognized_items": [dict(i) for i in recognized],
        "action": {"kind": kind, "description": description},
        "referenced_lines": [list(r) for r in referenced],
        "affected_lines": [list(r) for r in affected],
    }
    if proposed is not None:
        response["proposed_full_code"] = proposed
    return response


def pen_stroke(stroke_id: str, points, brush: str = "freeform", t0: float = 0.0) -> Stroke:
    pts = tuple((float(x), float(y), t0 + 10.0 * i) for i, (x, y) in enumerate(points))
    return Stroke(id=stroke_id, points=pts, input_kind="pen", brush=brush)


def wave_points(x0: float, y_mid: float, n: int = 20, span: float = 80.0, amp: float = 6.0):
    import math

    return [
        (x0 + span * i / (n - 1), y_mid + amp * math.sin(3.0 * math.pi * i / (n - 1)))
        for i in range(n)
    ]


@pytest.fixture
def manual_session():
    """Factory for sessions on a manual clock with injectable clients."""

    def make(
        code: str = "a = 1\nb = 2\nprint(a + b)\n",
        model=None,
        ocr=None,
        config: SessionConfig | None = None,
        **kwargs,
    ):
        clock = ManualClock()
        session = Session(
            config=config or SessionConfig(),
            clock=clock,
            model=model or MockModelClient(),
            ocr=ocr or MockOcrClient(),
            seed_files={"main.py": code},
            **kwargs,
        )
        return session, clock

    return make


def tick_span(session, clock, start: float, stop: float, step: float = 5.0):
    ms = start
    while ms < stop:
        clock.set(ms)
        session.tick()
        ms += step
