"""Session orchestration: one workspace of files, each with a version history
and an ink canvas, plus the debounced cascade, staged edits, the runner, and
an append-only event log.

Everything is written for deterministic replay. Event timestamps default to
values derived from the input (a stroke's own end time) rather than the
server clock, ids are sequential, and volatile measurements stay out of the
log, so feeding a log back through replay() with the same mock clients
reproduces the workspace byte for byte - including the re-emitted log.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import editing, gestures, pipeline
from .clients import (
    MockModelClient,
    MockOcrClient,
    ModelUnavailable,
    RemoteModelClient,
    RemoteOcrClient,
)
from .editing import StagedEditSet, TransientHighlight, VersionHistory
from .ink import Canvas, CanvasTransform, Rect, Stroke, line_band, line_span_for_bbox
from .pipeline import (
    NO_EDIT_PRODUCED,
    SYNTAX_ERROR_AFTER_EDIT,
    CascadeRun,
    CascadeSnapshot,
    Debouncer,
    FeedforwardChannel,
    Interpretation,
    SessionHistory,
    build_gutter_decorations,
)
from .runner import LaunchFailure, Runner, RunLimits, RunResult
from .scene import compose_scene

T_GROUP_MS = 800.0
HIGHLIGHT_MS = 1500.0


class BadConfig(Exception):
    pass


class NothingToCommit(Exception):
    """No ink to interpret and no fresh interpretation to stage."""


class NoStagedEdits(Exception):
    """Hunk resolution or finalize without a staged edit set."""


class CorruptRecord(Exception):
    """A session record that cannot be replayed."""


class ManualClock:
    """Test clock; starts at 0 ms and only moves when told to."""

    def __init__(self, start: float = 0.0):
        self._now = float(start)

    def now(self) -> float:
        return self._now

    def advance(self, ms: float) -> float:
        self._now += ms
        return self._now

    def set(self, ms: float) -> None:
        if ms > self._now:
            self._now = float(ms)


class RealClock:
    def now(self) -> float:
        return time.monotonic() * 1000.0


@dataclass
class SessionConfig:
    model: str = "mock"
    ocr: str = "mock"
    model_endpoint: str | None = None
    ocr_endpoint: str | None = None
    model_api_key: str | None = None
    ocr_api_key: str | None = None
    debounce_ms: float = pipeline.DEBOUNCE_MS
    t_group_ms: float = T_GROUP_MS
    history_tail: int = pipeline.HISTORY_TAIL
    runner_cmd: list[str] | None = None
    timeout_ms: int = 10_000
    workdir: str | None = None
    seed_dir: str | None = None


@dataclass
class FileState:
    history: VersionHistory
    canvas: Canvas
    staged: StagedEditSet | None = None
    last_interpretation: Interpretation | None = None
    last_complete_revision: int = -1
    console: list[dict] = field(default_factory=list)

    @property
    def staged_pending(self) -> bool:
        return self.staged is not None and self.staged.finalized_version is None


def _build_clients(config: SessionConfig):
    try:
        if config.model == "mock":
            model = MockModelClient()
        elif config.model == "remote":
            model = RemoteModelClient(config.model_endpoint, config.model_api_key)
        else:
            raise BadConfig(f"unknown model kind {config.model!r}")
        if config.ocr == "mock":
            ocr = MockOcrClient()
        elif config.ocr == "remote":
            ocr = RemoteOcrClient(config.ocr_endpoint, config.ocr_api_key)
        else:
            raise BadConfig(f"unknown ocr kind {config.ocr!r}")
    except ValueError as exc:
        raise BadConfig(str(exc)) from exc
    return model, ocr


def _seed_files(config: SessionConfig) -> dict[str, str]:
    if config.seed_dir is None:
        return {"untitled.py": ""}
    root = Path(config.seed_dir)
    if not root.is_dir():
        raise BadConfig(f"seed dir {config.seed_dir!r} is not a directory")
    files: dict[str, str] = {}
    for path in sorted(root.rglob("*")):
        if path.is_file() and not path.name.startswith("."):
            try:
                files[path.relative_to(root).as_posix()] = path.read_text(encoding="utf-8")
            except UnicodeDecodeError:
                continue  # binary files are not code documents
    if not files:
        raise BadConfig(f"seed dir {config.seed_dir!r} holds no text files")
    return files


class Session:
    """Single-writer session engine. All mutations funnel through methods of
    this class; the service layer serializes calls per session."""

    def __init__(
        self,
        config: SessionConfig | None = None,
        clock=None,
        model=None,
        ocr=None,
        log_path: str | None = None,
        seed_files: dict[str, str] | None = None,
        active_file: str | None = None,
    ):
        self.config = config or SessionConfig()
        self.clock = clock or RealClock()
        self._t0 = self.clock.now()
        if model is None or ocr is None:
            built_model, built_ocr = _build_clients(self.config)
            model = model or built_model
            ocr = ocr or built_ocr
        self.model = model
        self.ocr = ocr
        self.templates = gestures.load_templates()
        self.runner = Runner(self.config.runner_cmd, workdir=self.config.workdir)
        self.channel = FeedforwardChannel()
        self.debouncer = Debouncer(self.config.debounce_ms)
        self.history = SessionHistory()
        self.highlights: list[TransientHighlight] = []
        self.events: list[dict] = []
        self._log_file = open(log_path, "a", encoding="utf-8") if log_path else None
        self._seq = 0
        self._interp_counter = 0
        self._cascade_seq = 0
        self._cascade: CascadeRun | None = None
        self._interps: dict[str, Interpretation] = {}
        self._scene_cache: dict[tuple, object] = {}

        files = seed_files if seed_files is not None else _seed_files(self.config)
        if not files:
            raise BadConfig("session needs at least one file")
        self.files: dict[str, FileState] = {}
        for path, text in files.items():
            canvas = Canvas()
            self.files[path] = FileState(
                history=VersionHistory(text, initial_snapshot=canvas.snapshot()),
                canvas=canvas,
            )
        self.active_file = active_file or next(iter(sorted(self.files)))
        if self.active_file not in self.files:
            raise BadConfig(f"active file {self.active_file!r} not in workspace")
        self._log(
            "session_created",
            {"files": dict(files), "active_file": self.active_file},
            t=0.0,
        )

    # --- plumbing -----------------------------------------------------------

    def now_rel(self) -> float:
        return self.clock.now() - self._t0

    @property
    def fs(self) -> FileState:
        return self.files[self.active_file]

    def _line_count(self, fs: FileState | None = None) -> int:
        fs = fs or self.fs
        return fs.history.current.line_count()

    def _log(self, kind: str, data: dict, t: float | None = None) -> dict:
        self._seq += 1
        event = {
            "seq": self._seq,
            "t": float(t if t is not None else self.now_rel()),
            "event": kind,
            "data": data,
        }
        self.events.append(event)
        if self._log_file is not None:
            self._log_file.write(json.dumps(event, sort_keys=True, separators=(",", ":")) + "\n")
            self._log_file.flush()
        return event

    def close(self) -> None:
        if self._log_file is not None:
            self._log_file.close()
            self._log_file = None

    def _cancel_stale_cascade(self) -> None:
        if self._cascade is not None and (
            self._cascade.snapshot.revision != self.fs.canvas.revision
        ):
            self._cascade.cancel()
            self._cascade = None

    # --- input events ---------------------------------------------------------

    def add_stroke(self, stroke, t: float | None = None) -> dict:
        """Store one ink stroke on the active file's canvas.

        Eraser-brush strokes sent through the stroke path are routed to
        erasure. Event time defaults to the stroke's own end timestamp so
        logs do not depend on server wall clock.
        """
        if isinstance(stroke, dict):
            stroke = Stroke.from_wire(stroke)
        if stroke.is_eraser:
            removed = self.erase(
                [(p[0], p[1]) for p in stroke.points],
                radius=max(stroke.width, 4.0),
                t=t if t is not None else stroke.end_t,
            )
            return {"stroke_id": None, "erased": removed}
        t_eff = float(t if t is not None else stroke.end_t)
        fs = self.fs
        stroke_id, sealed = fs.canvas.add_stroke(stroke, self._line_count(fs))
        self._log("stroke_added", {"stroke": stroke.to_wire(), "file": self.active_file}, t=t_eff)
        self.debouncer.poke(t_eff)
        self._cancel_stale_cascade()
        return {"stroke_id": stroke_id, "sealed_group": sealed.id if sealed else None}

    def erase(self, path_points, radius: float, t: float | None = None) -> list[str]:
        fs = self.fs
        removed = fs.canvas.erase_at(path_points, radius, self._line_count(fs))
        self._log(
            "erase",
            {
                "path": [[float(x), float(y)] for x, y in path_points],
                "radius": float(radius),
                "removed": removed,
            },
            t=t,
        )
        if removed:
            self.debouncer.poke(float(t) if t is not None else self.now_rel())
            self._cancel_stale_cascade()
        return removed

    def set_transform(self, transform, t: float | None = None) -> CanvasTransform:
        if isinstance(transform, dict):
            transform = CanvasTransform.from_dict(transform)
        self.fs.canvas.set_transform(transform)
        self._log("transform", {"transform": transform.to_dict()}, t=t)
        self._cancel_stale_cascade()
        return transform

    def select(self, rect: Rect) -> dict:
        # selection is a query; it leaves no trace in the record
        return self.fs.canvas.select_items(tuple(float(v) for v in rect))

    def apply_touch(self, samples, t: float | None = None) -> dict:
        """Classify a finished touch sequence and apply its system action."""
        if samples and isinstance(samples[0], dict):
            samples = [
                gestures.TouchSample(
                    finger=s["finger"], x=s["x"], y=s["y"], t=s["t"], phase=s["phase"]
                )
                for s in samples
            ]
        event = gestures.classify_touch_gesture(samples)
        outcome: dict = {"gesture": event.kind}
        if event.kind == "pan":
            tr = self.fs.canvas.transform
            new = CanvasTransform(
                scroll_y=tr.scroll_y - event.payload["dy"] / tr.zoom,
                zoom=tr.zoom,
                line_height=tr.line_height,
                gutter_width=tr.gutter_width,
                code_origin=tr.code_origin,
            )
            self.set_transform(new, t=t)
            outcome["transform"] = new.to_dict()
        elif event.kind == "undo":
            try:
                outcome["version"] = self.undo(t=t).version_id
            except editing.NothingToUndo:
                outcome["noop"] = True
        elif event.kind == "redo":
            try:
                outcome["version"] = self.redo(t=t).version_id
            except editing.NothingToRedo:
                outcome["noop"] = True
        elif event.kind == "select_canvas":
            outcome["selection"] = self.select(event.payload["rect"])
        elif event.kind == "select_code":
            rect = event.payload["rect"]
            span = line_span_for_bbox(
                self.fs.canvas.transform, tuple(rect), self._line_count()
            )
            outcome["lines"] = list(span) if span else None
        return outcome

    def edit_description(self, text: str, t: float | None = None) -> Interpretation:
        interp = self.fs.last_interpretation
        if interp is None:
            raise ValueError("no interpretation to edit")
        pipeline.edit_interpretation_text(interp, text)
        self._log("description_edited", {"interpretation_id": interp.id, "text": text}, t=t)
        self.channel.broadcast(
            {"type": "feedforward", "stage": "edited", "interpretation": interp.to_dict()}
        )
        return interp

    def add_file(self, path: str, text: str = "", t: float | None = None) -> None:
        if path in self.files:
            raise ValueError(f"file {path!r} already exists")
        canvas = Canvas()
        self.files[path] = FileState(
            history=VersionHistory(text, initial_snapshot=canvas.snapshot()),
            canvas=canvas,
        )
        self._log("file_added", {"path": path, "text": text}, t=t)

    def switch_file(self, path: str, t: float | None = None) -> None:
        """Make another file active; the old file's open sketch buffer seals
        because a sketch cannot span files."""
        if path not in self.files:
            raise KeyError(path)
        if path == self.active_file:
            return
        t_eff = float(t if t is not None else self.now_rel())
        fs = self.fs
        fs.canvas.close_group(t_eff, self._line_count(fs), force=True)
        if self._cascade is not None:
            self._cascade.cancel()
            self._cascade = None
        self.debouncer.cancel()
        self.active_file = path
        self._log("file_switched", {"path": path}, t=t_eff)

    # --- cascade scheduling -----------------------------------------------------

    def _has_uninterpreted_ink(self, fs: FileState) -> bool:
        has_pen = any(
            s.input_kind == "pen" for s in fs.canvas.live_strokes()
        )
        return has_pen and fs.last_complete_revision != fs.canvas.revision

    def _staged_region(self, fs: FileState) -> tuple[Rect, ...]:
        if not fs.staged_pending:
            return ()
        tr = fs.canvas.transform
        rects = []
        for hunk in fs.staged.hunks:
            start = hunk.base_start
            end = max(hunk.base_end, hunk.base_start)
            top, _ = line_band(tr, start)
            _, bottom = line_band(tr, end)
            rects.append((-1e6, top, 2e6, bottom - top))
        return tuple(rects)

    def _scene_factory(self, fs: FileState):
        version = fs.history.current
        key = (
            self.active_file,
            version.version_id,
            fs.canvas.revision,
            json.dumps(fs.canvas.transform.to_dict(), sort_keys=True),
            len(fs.console),
        )
        strokes = tuple(fs.canvas.live_strokes())
        console = list(fs.console)
        transform = fs.canvas.transform

        def factory():
            scene = self._scene_cache.get(key)
            if scene is None:
                scene = compose_scene(version.text, list(strokes), console, transform)
                if len(self._scene_cache) > 8:
                    self._scene_cache.pop(next(iter(self._scene_cache)))
                self._scene_cache[key] = scene
            return scene

        return factory

    def _start_cascade(self) -> CascadeRun:
        fs = self.fs
        self._interp_counter += 1
        self._cascade_seq += 1
        interp = fs.last_interpretation
        user_description = None
        if (
            interp is not None
            and interp.action.get("user_edited")
            and not interp.committed
        ):
            user_description = interp.action.get("description")
        snapshot = CascadeSnapshot(
            revision=fs.canvas.revision,
            seq=self._cascade_seq,
            strokes=tuple(fs.canvas.live_strokes()),
            groups=tuple(fs.canvas.all_groups(self._line_count(fs))),
            text=fs.history.current.text,
            version_id=fs.history.current.version_id,
            transform=fs.canvas.transform,
            line_count=self._line_count(fs),
            staged_pending=fs.staged_pending,
            staged_region=self._staged_region(fs),
            history_tail=self.history.tail(self.config.history_tail),
            user_description=user_description,
            scene_factory=self._scene_factory(fs),
        )
        return CascadeRun(
            f"interp-{self._interp_counter}",
            snapshot,
            self.model,
            self.ocr,
            self.channel,
            self.templates,
            clock=self.now_rel,
        )

    def tick(self, now: float | None = None) -> None:
        """Advance timer-driven work: group closure, debounce firing, and one
        cascade stage per call."""
        rel_now = float(now if now is not None else self.now_rel())
        fs = self.fs
        if fs.canvas.buffer is not None:
            group = fs.canvas.close_group(rel_now, self._line_count(fs))
            if group is not None:
                self._log("group_closed", {"group": group.to_dict()}, t=rel_now)
        if self.debouncer.due(rel_now):
            self.debouncer.cancel()
            if self._has_uninterpreted_ink(fs) and self._cascade is None:
                self._cascade = self._start_cascade()
        if self._cascade is not None:
            self._cancel_stale_cascade()
        if self._cascade is not None:
            run = self._cascade
            if run.step():
                self._cascade = None
                self._complete_cascade(run, rel_now)

    def _complete_cascade(self, run: CascadeRun, t: float) -> Interpretation:
        fs = self.fs
        interp = run.interpretation
        fs.last_interpretation = interp
        fs.last_complete_revision = interp.revision
        self._interps[interp.id] = interp
        texts = [
            i["content"] for i in interp.recognized_items if i.get("kind") == "text"
        ]
        if interp.action.get("description"):
            texts.append(interp.action["description"])
        entry = {
            "scene_hash": interp.scene_hash,
            "code_snapshot_version": fs.history.current.version_id,
            "interpretation_id": interp.id,
            "natural_language_inputs": texts,
            "model_output_digest": run.model_digest,
        }
        self.history.append(
            scene_hash=entry["scene_hash"],
            code_version=entry["code_snapshot_version"],
            interpretation_id=entry["interpretation_id"],
            natural_language_inputs=entry["natural_language_inputs"],
            model_output_digest=entry["model_output_digest"],
        )
        self._log(
            "interpretation_published",
            {"interpretation": interp.to_dict(), "history_entry": entry},
            t=t,
        )
        self.channel.publish(
            (interp.revision, run.snapshot.seq, len(pipeline.STAGES) + 1),
            {
                "type": "gutter",
                "decorations": [d.to_dict() for d in build_gutter_decorations(interp)],
            },
        )
        if interp.decision is not None:
            self._apply_decision(interp, t)
        return interp

    def _apply_decision(self, interp: Interpretation, t: float) -> None:
        fs = self.fs
        if not fs.staged_pending:
            return
        self.remove_stroke(interp.decision["stroke_id"], t=t)
        decision = interp.decision["kind"]
        for index in list(fs.staged.pending):
            self.resolve_hunk(index, decision, t=t)
        self.finalize(t=t)

    def remove_stroke(self, stroke_id: str, t: float | None = None) -> None:
        """Drop a stroke consumed as a gesture (it is not content ink)."""
        self.fs.canvas.remove_stroke(stroke_id, self._line_count())
        self._log("stroke_removed", {"stroke_id": stroke_id}, t=t)

    # --- commit / resolve / finalize ----------------------------------------------

    def commit(self, t: float | None = None) -> StagedEditSet:
        """Interpret current ink (reusing a fresh cascade when possible) and
        stage the proposed edit as hunks."""
        fs = self.fs
        t_eff = float(t if t is not None else self.now_rel())
        self.debouncer.cancel()
        fs.canvas.close_group(t_eff, self._line_count(fs), force=True)
        self._cancel_stale_cascade()

        interp = None
        if self._cascade is not None:
            # single-flight: the in-flight cascade is fresh, finish it instead
            # of paying for a second model call
            run = self._cascade
            self._cascade = None
            run.run_all()
            interp = self._complete_cascade(run, t_eff)
        else:
            last = fs.last_interpretation
            if (
                last is not None
                and last.complete
                and not last.committed
                and last.revision == fs.canvas.revision
            ):
                interp = last
        if interp is None:
            has_pen = any(s.input_kind == "pen" for s in fs.canvas.live_strokes())
            if not has_pen:
                raise NothingToCommit("blank canvas and no fresh interpretation")
            run = self._start_cascade()
            run.run_all()
            interp = self._complete_cascade(run, t_eff)

        if interp.decision is not None:
            # the gesture already resolved the staged set; nothing new to stage
            if fs.staged is None:
                raise NothingToCommit("gesture decision consumed the staged edits")
            return fs.staged

        proposed = interp.proposed_full_code
        if proposed is None:
            proposed = self._request_code(fs, interp)
        if proposed is None:
            proposed = fs.history.current.text

        staged = editing.stage_edits(fs.history.current, proposed, interp.id)
        if not staged.hunks:
            interp.add_diagnostic(NO_EDIT_PRODUCED)
        interp.committed = True
        fs.staged = staged
        self._log(
            "commit",
            {"interpretation_id": interp.id, "staged": staged.to_dict()},
            t=t_eff,
        )
        self._broadcast_staged(fs)
        self.channel.broadcast(
            {
                "type": "gutter",
                "decorations": [d.to_dict() for d in build_gutter_decorations(interp)],
            }
        )
        return staged

    def _request_code(self, fs: FileState, interp: Interpretation) -> str | None:
        """One extra model call when the cascade response carried no code."""
        scene = self._scene_factory(fs)()
        request = {
            "scene_svg": scene.svg,
            "scene_hash": scene.content_hash,
            "code": fs.history.current.text,
            "brush_constraints": None,
            "recognized_items": [dict(i) for i in interp.recognized_items],
            "history": self.history.tail(self.config.history_tail),
            "description": interp.action.get("description") or None,
            "produce_code": True,
        }
        response = self.model.interpret(request)
        return response.get("proposed_full_code")

    def resolve_hunk(self, index: int, decision: str, t: float | None = None) -> StagedEditSet:
        fs = self.fs
        if fs.staged is None:
            raise NoStagedEdits("no staged edit set")
        fs.staged.resolve(index, decision)
        self._log("hunk_resolved", {"index": index, "decision": decision}, t=t)
        self._broadcast_staged(fs)
        return fs.staged

    def finalize(self, t: float | None = None):
        """Fold the resolved staged set into a new version; idempotent."""
        fs = self.fs
        if fs.staged is None:
            raise NoStagedEdits("no staged edit set")
        t_eff = float(t if t is not None else self.now_rel())
        already = fs.staged.finalized_version is not None
        accepted = fs.staged.any_accepted()
        base_text = fs.history.get(fs.staged.base_version).text
        if not already and accepted:
            interp = self._interps.get(fs.staged.provenance)
            if interp is not None and interp.group_ids:
                fs.canvas.clear_groups(interp.group_ids)
        version = editing.finalize(
            fs.history, fs.staged, snapshot=fs.canvas.snapshot() if accepted else None
        )
        self._log(
            "finalize", {"version_id": version.version_id, "accepted": accepted}, t=t_eff
        )
        if not already and accepted:
            for a, b in editing.changed_ranges(base_text, version.text):
                self.highlights.append(TransientHighlight(a, b, t_eff + HIGHLIGHT_MS))
            self.channel.broadcast(
                {
                    "type": "transient_highlight",
                    "ranges": [
                        [h.start_line, h.end_line] for h in self.highlights if h.active(t_eff)
                    ],
                    "expires_at": t_eff + HIGHLIGHT_MS,
                }
            )
        self._broadcast_staged(fs)
        return version

    def _broadcast_staged(self, fs: FileState) -> None:
        base_text = (
            fs.history.get(fs.staged.base_version).text if fs.staged is not None else ""
        )
        self.channel.broadcast(
            {
                "type": "staged_diff",
                "staged": fs.staged.to_dict() if fs.staged is not None else None,
                "unified": fs.staged.unified(base_text) if fs.staged is not None else "",
            }
        )

    # --- run -------------------------------------------------------------------

    def run(self, t: float | None = None) -> RunResult:
        fs = self.fs
        limits = RunLimits(timeout_ms=self.config.timeout_ms)
        try:
            result = self.runner.execute(fs.history.current, limits)
        except LaunchFailure as exc:
            result = RunResult(stdout="", stderr=str(exc), exit="launch-failure")
        self._absorb_run(result, t=t)
        return result

    def _absorb_run(self, result: RunResult, t: float | None = None, logged: dict | None = None) -> None:
        fs = self.fs
        if result.stdout or result.stderr:
            fs.console.append({"kind": "text", "text": result.stdout + result.stderr})
        for fmt, data in result.images:
            import base64 as _b64

            fs.console.append(
                {"kind": "image", "format": fmt, "data": _b64.b64encode(data).decode("ascii")}
            )
        if result.is_syntax_failure:
            interp = self._interps.get(fs.history.current.provenance)
            if interp is not None:
                interp.add_diagnostic(SYNTAX_ERROR_AFTER_EDIT)
        payload = logged if logged is not None else {"result": result.to_dict()}
        self._log("run", payload, t=t)
        self.channel.broadcast({"type": "run_output", "result": payload["result"]})

    # --- undo / redo ----------------------------------------------------------

    def undo(self, t: float | None = None):
        fs = self.fs
        version = fs.history.undo()
        snap = fs.history.snapshot_for.get(version.version_id)
        if snap is not None:
            fs.canvas.restore(snap)
        fs.staged = None
        fs.last_interpretation = None
        self._log("undo", {"version_id": version.version_id}, t=t)
        self._broadcast_staged(fs)
        return version

    def redo(self, t: float | None = None):
        fs = self.fs
        version = fs.history.redo()
        snap = fs.history.snapshot_for.get(version.version_id)
        if snap is not None:
            fs.canvas.restore(snap)
        fs.staged = None
        fs.last_interpretation = None
        self._log("redo", {"version_id": version.version_id}, t=t)
        self._broadcast_staged(fs)
        return version

    # --- state ------------------------------------------------------------------

    def state(self) -> dict:
        now = self.now_rel()
        self.highlights = [h for h in self.highlights if h.active(now)]
        fs = self.fs
        interp = fs.last_interpretation
        return {
            "active_file": self.active_file,
            "files": {
                path: {
                    "version_id": f.history.current.version_id,
                    "text": f.history.current.text,
                    "can_undo": f.history.can_undo(),
                    "can_redo": f.history.can_redo(),
                    "staged": f.staged.to_dict() if f.staged else None,
                    "console": list(f.console),
                    "stroke_count": len(f.canvas.order),
                    "groups": [g.to_dict() for g in f.canvas.all_groups(f.history.current.line_count())],
                }
                for path, f in self.files.items()
            },
            "interpretation": interp.to_dict() if interp else None,
            "gutter": [d.to_dict() for d in build_gutter_decorations(interp)] if interp else [],
            "highlights": [[h.start_line, h.end_line] for h in self.highlights],
            "history_entries": len(self.history.entries),
        }

    def state_digest(self) -> str:
        payload = {
            "active_file": self.active_file,
            "files": {
                path: {
                    "versions": [
                        {
                            "id": v.version_id,
                            "text": v.text,
                            "parent": v.parent,
                            "provenance": v.provenance,
                        }
                        for v in f.history.all_versions()
                    ],
                    "current": f.history.current.version_id,
                    "canvas": f.canvas.snapshot(),
                    "staged": f.staged.to_dict() if f.staged else None,
                    "console": f.console,
                }
                for path, f in self.files.items()
            },
            "history": self.history.entries,
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def create_session(config: SessionConfig | None = None, **kwargs) -> Session:
    return Session(config=config, **kwargs)


# --- replay ---------------------------------------------------------------------


def _load_record(source) -> list[dict]:
    if isinstance(source, Path) or (
        isinstance(source, str) and not source.lstrip().startswith("{")
    ):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    elif isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = list(source)
    events = []
    for i, line in enumerate(lines, 1):
        if isinstance(line, dict):
            events.append(line)
            continue
        if not line.strip():
            continue
        try:
            events.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise CorruptRecord(f"line {i}: bad JSON: {exc}") from exc
    return events


_REPLAY_KINDS = {
    "session_created",
    "stroke_added",
    "group_closed",
    "interpretation_published",
    "description_edited",
    "commit",
    "hunk_resolved",
    "finalize",
    "run",
    "undo",
    "redo",
    "erase",
    "transform",
    "file_switched",
    "file_added",
    "stroke_removed",
}


def replay(source, model=None, ocr=None, config: SessionConfig | None = None) -> Session:
    """Rebuild a session from its event log using deterministic clients.

    Inputs are re-derived through the engine; interpretations and run
    results are restored from the record (feedforward is side-effect free
    and runs are not re-executed).
    """
    events = _load_record(source)
    if not events or events[0].get("event") != "session_created":
        raise CorruptRecord("record must start with session_created")
    head = events[0].get("data", {})
    try:
        session = Session(
            config=config or SessionConfig(),
            clock=ManualClock(),
            model=model or MockModelClient(),
            ocr=ocr or MockOcrClient(),
            seed_files=dict(head["files"]),
            active_file=head.get("active_file"),
        )
    except (KeyError, BadConfig) as exc:
        raise CorruptRecord(f"bad session_created event: {exc}") from exc

    for event in events[1:]:
        try:
            kind = event["event"]
            data = event.get("data", {})
            t = float(event.get("t", 0.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptRecord(f"malformed event envelope: {event!r}") from exc
        if kind not in _REPLAY_KINDS:
            raise CorruptRecord(f"unknown event kind {kind!r}")
        session.clock.set(t)
        try:
            _apply_event(session, kind, data, t)
        except CorruptRecord:
            raise
        except Exception as exc:
            raise CorruptRecord(f"event seq {event.get('seq')}: {kind}: {exc}") from exc
    return session


def _apply_event(session: Session, kind: str, data: dict, t: float) -> None:
    fs = session.fs
    if kind == "stroke_added":
        session.add_stroke(data["stroke"], t=t)
    elif kind == "group_closed":
        group = fs.canvas.close_group(t, session._line_count(fs), force=True)
        if group is None:
            raise CorruptRecord("group_closed with no open buffer")
        session._log("group_closed", {"group": group.to_dict()}, t=t)
    elif kind == "interpretation_published":
        interp = Interpretation.from_dict(data["interpretation"])
        fs.last_interpretation = interp
        fs.last_complete_revision = interp.revision
        session._interps[interp.id] = interp
        number = int(interp.id.rsplit("-", 1)[1])
        session._interp_counter = max(session._interp_counter, number)
        entry = data["history_entry"]
        session.history.append(
            scene_hash=entry["scene_hash"],
            code_version=entry["code_snapshot_version"],
            interpretation_id=entry["interpretation_id"],
            natural_language_inputs=entry["natural_language_inputs"],
            model_output_digest=entry["model_output_digest"],
        )
        session._log("interpretation_published", data, t=t)
    elif kind == "description_edited":
        session.edit_description(data["text"], t=t)
    elif kind == "commit":
        session.commit(t=t)
    elif kind == "hunk_resolved":
        session.resolve_hunk(data["index"], data["decision"], t=t)
    elif kind == "finalize":
        session.finalize(t=t)
    elif kind == "run":
        session._absorb_run(RunResult.from_dict(data["result"]), t=t, logged=data)
    elif kind == "undo":
        session.undo(t=t)
    elif kind == "redo":
        session.redo(t=t)
    elif kind == "erase":
        session.erase([tuple(p) for p in data["path"]], data["radius"], t=t)
    elif kind == "transform":
        session.set_transform(data["transform"], t=t)
    elif kind == "file_switched":
        session.switch_file(data["path"], t=t)
    elif kind == "file_added":
        session.add_file(data["path"], data.get("text", ""), t=t)
    elif kind == "stroke_removed":
        session.remove_stroke(data["stroke_id"], t=t)
