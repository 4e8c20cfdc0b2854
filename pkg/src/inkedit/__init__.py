"""Ink-over-code editing engine: free-form sketches on a code canvas are
grouped, recognized, interpreted into proposed edits, staged as reviewable
hunks, and folded into a version history - with an append-only record that
replays deterministically."""

from .clients import (
    MockModelClient,
    MockOcrClient,
    ModelUnavailable,
    OcrUnavailable,
    RemoteModelClient,
    RemoteOcrClient,
    validate_model_response,
)
from .diffs import Hunk, apply_hunks, diff_lines, script_to_hunks, unified_diff
from .editing import (
    DocumentVersion,
    StagedEditSet,
    VersionHistory,
    finalize,
    stage_edits,
)
from .gestures import DegenerateStroke, classify_touch_gesture, recognize_unistroke
from .ink import Canvas, CanvasTransform, SketchGroup, Stroke
from .pipeline import CascadeRun, CascadeSnapshot, FeedforwardChannel, Interpretation
from .runner import LaunchFailure, RunLimits, RunResult, Runner
from .scene import Scene, compose_scene
from .session import (
    BadConfig,
    CorruptRecord,
    ManualClock,
    NoStagedEdits,
    NothingToCommit,
    RealClock,
    Session,
    SessionConfig,
    create_session,
    replay,
)

__all__ = [
    "BadConfig",
    "Canvas",
    "CanvasTransform",
    "CascadeRun",
    "CascadeSnapshot",
    "CorruptRecord",
    "DegenerateStroke",
    "DocumentVersion",
    "FeedforwardChannel",
    "Hunk",
    "Interpretation",
    "LaunchFailure",
    "ManualClock",
    "MockModelClient",
    "MockOcrClient",
    "ModelUnavailable",
    "NoStagedEdits",
    "NothingToCommit",
    "OcrUnavailable",
    "RealClock",
    "RemoteModelClient",
    "RemoteOcrClient",
    "RunLimits",
    "RunResult",
    "Runner",
    "Scene",
    "Session",
    "SessionConfig",
    "SketchGroup",
    "StagedEditSet",
    "Stroke",
    "VersionHistory",
    "apply_hunks",
    "classify_touch_gesture",
    "compose_scene",
    "create_session",
    "diff_lines",
    "finalize",
    "recognize_unistroke",
    "replay",
    "script_to_hunks",
    "stage_edits",
    "unified_diff",
    "validate_model_response",
]

__version__ = "0.1.0"
