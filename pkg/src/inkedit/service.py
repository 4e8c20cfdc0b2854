"""HTTP + WebSocket service wrapping session engines.

One process hosts many sessions. Each session is single-writer: every
mutation goes through that session's asyncio lock, and a per-session
background task drives tick() so group timers and the interpretation
debounce fire without client traffic. Sessions created with
``manual_clock`` get no background task; callers step time explicitly
through POST .../advance, which makes service-level tests deterministic.
"""

from __future__ import annotations

import asyncio
import contextlib
import dataclasses
import json

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse

from . import editing
from .clients import ModelUnavailable, OcrUnavailable
from .ink import MalformedStroke
from .session import (
    BadConfig,
    ManualClock,
    NoStagedEdits,
    NothingToCommit,
    Session,
    SessionConfig,
)

TICK_INTERVAL_S = 0.025


class SessionHandle:
    def __init__(self, session: Session, manual: bool):
        self.session = session
        self.manual = manual
        self.lock = asyncio.Lock()
        self.tick_task: asyncio.Task | None = None
        self.sockets: set = set()


def _config_from_body(body: dict, default: SessionConfig | None) -> SessionConfig:
    cfg = body.get("config") or {}
    allowed = set(SessionConfig.__dataclass_fields__)
    unknown = set(cfg) - allowed
    if unknown:
        raise BadConfig(f"unknown config keys: {sorted(unknown)}")
    if default is not None:
        return dataclasses.replace(default, **cfg)
    return SessionConfig(**cfg)


def create_app(default_config: SessionConfig | None = None) -> FastAPI:
    app = FastAPI(title="inkedit", docs_url=None, redoc_url=None)
    registry: dict[str, SessionHandle] = {}
    app.state.registry = registry
    counter = {"n": 0}

    def handle_of(session_id: str) -> SessionHandle:
        handle = registry.get(session_id)
        if handle is None:
            raise HTTPException(404, f"no session {session_id}")
        return handle

    async def tick_loop(handle: SessionHandle) -> None:
        while True:
            await asyncio.sleep(TICK_INTERVAL_S)
            async with handle.lock:
                handle.session.tick()

    @app.post("/sessions")
    async def create_session(body: dict | None = None):
        body = body or {}
        try:
            config = _config_from_body(body, default_config)
            manual = bool(body.get("manual_clock"))
            session = Session(
                config=config,
                clock=ManualClock() if manual else None,
                seed_files=body.get("files"),
                active_file=body.get("active_file"),
                log_path=body.get("log_path"),
            )
        except BadConfig as exc:
            raise HTTPException(400, str(exc)) from exc
        except TypeError as exc:
            raise HTTPException(400, f"bad config: {exc}") from exc
        counter["n"] += 1
        session_id = f"s-{counter['n']}"
        handle = SessionHandle(session, manual)
        registry[session_id] = handle
        if not manual:
            handle.tick_task = asyncio.create_task(tick_loop(handle))
        return {"session_id": session_id, "state": session.state()}

    @app.get("/sessions/{session_id}/state")
    async def get_state(session_id: str):
        handle = handle_of(session_id)
        async with handle.lock:
            return handle.session.state()

    @app.get("/sessions/{session_id}/log", response_class=PlainTextResponse)
    async def get_log(session_id: str):
        handle = handle_of(session_id)
        async with handle.lock:
            return (
                "\n".join(
                    json.dumps(e, sort_keys=True, separators=(",", ":"))
                    for e in handle.session.events
                )
                + "\n"
            )

    @app.post("/sessions/{session_id}/advance")
    async def advance(session_id: str, body: dict):
        handle = handle_of(session_id)
        if not handle.manual:
            raise HTTPException(409, "session runs on a real clock")
        ms = float(body.get("ms", 0.0))
        steps = max(1, int(body.get("steps", 1)))
        async with handle.lock:
            clock = handle.session.clock
            for _ in range(steps):
                clock.advance(ms / steps)
                handle.session.tick()
            # drain any cascade the last advance started
            for _ in range(16):
                if handle.session._cascade is None:
                    break
                handle.session.tick()
            return handle.session.state()

    @app.post("/sessions/{session_id}/commit")
    async def commit(session_id: str, body: dict | None = None):
        handle = handle_of(session_id)
        t = (body or {}).get("t")
        async with handle.lock:
            try:
                staged = await asyncio.to_thread(handle.session.commit, t)
            except NothingToCommit as exc:
                raise HTTPException(409, str(exc)) from exc
            except ModelUnavailable as exc:
                raise HTTPException(502, str(exc)) from exc
            return {"staged": staged.to_dict()}

    @app.post("/sessions/{session_id}/hunks/{index}/{decision}")
    async def resolve_hunk(session_id: str, index: int, decision: str, body: dict | None = None):
        handle = handle_of(session_id)
        if decision not in ("accept", "reject"):
            raise HTTPException(400, "decision must be accept or reject")
        t = (body or {}).get("t")
        async with handle.lock:
            try:
                staged = handle.session.resolve_hunk(index, decision, t=t)
            except NoStagedEdits as exc:
                raise HTTPException(409, str(exc)) from exc
            except editing.NoSuchHunk as exc:
                raise HTTPException(404, str(exc)) from exc
            except editing.AlreadyResolved as exc:
                raise HTTPException(409, str(exc)) from exc
            return {"staged": staged.to_dict()}

    @app.post("/sessions/{session_id}/finalize")
    async def finalize(session_id: str, body: dict | None = None):
        handle = handle_of(session_id)
        t = (body or {}).get("t")
        async with handle.lock:
            try:
                version = handle.session.finalize(t=t)
            except NoStagedEdits as exc:
                raise HTTPException(409, str(exc)) from exc
            except editing.PendingHunksRemain as exc:
                raise HTTPException(409, str(exc)) from exc
            return {
                "version_id": version.version_id,
                "text": version.text,
            }

    @app.post("/sessions/{session_id}/run")
    async def run(session_id: str, body: dict | None = None):
        handle = handle_of(session_id)
        t = (body or {}).get("t")
        async with handle.lock:
            result = await asyncio.to_thread(handle.session.run, t)
            return {"result": result.to_dict()}

    @app.post("/sessions/{session_id}/undo")
    async def undo(session_id: str, body: dict | None = None):
        handle = handle_of(session_id)
        t = (body or {}).get("t")
        async with handle.lock:
            try:
                version = handle.session.undo(t=t)
            except editing.NothingToUndo as exc:
                raise HTTPException(409, str(exc)) from exc
            return {"version_id": version.version_id, "text": version.text}

    @app.post("/sessions/{session_id}/redo")
    async def redo(session_id: str, body: dict | None = None):
        handle = handle_of(session_id)
        t = (body or {}).get("t")
        async with handle.lock:
            try:
                version = handle.session.redo(t=t)
            except editing.NothingToRedo as exc:
                raise HTTPException(409, str(exc)) from exc
            return {"version_id": version.version_id, "text": version.text}

    @app.post("/sessions/{session_id}/interpretation/description")
    async def edit_description(session_id: str, body: dict):
        handle = handle_of(session_id)
        text = body.get("text")
        if not isinstance(text, str):
            raise HTTPException(400, "body needs a text field")
        async with handle.lock:
            try:
                interp = handle.session.edit_description(text, t=body.get("t"))
            except ValueError as exc:
                raise HTTPException(409, str(exc)) from exc
            return {"interpretation": interp.to_dict()}

    @app.post("/sessions/{session_id}/files")
    async def add_file(session_id: str, body: dict):
        handle = handle_of(session_id)
        path = body.get("path")
        if not path:
            raise HTTPException(400, "body needs a path field")
        async with handle.lock:
            try:
                handle.session.add_file(path, body.get("text", ""), t=body.get("t"))
            except ValueError as exc:
                raise HTTPException(409, str(exc)) from exc
            return {"files": sorted(handle.session.files)}

    @app.post("/sessions/{session_id}/files/switch")
    async def switch_file(session_id: str, body: dict):
        handle = handle_of(session_id)
        path = body.get("path")
        async with handle.lock:
            try:
                handle.session.switch_file(path, t=body.get("t"))
            except KeyError as exc:
                raise HTTPException(404, f"no file {path!r}") from exc
            return {"active_file": handle.session.active_file}

    @app.delete("/sessions/{session_id}")
    async def close_session(session_id: str):
        handle = registry.pop(session_id, None)
        if handle is None:
            raise HTTPException(404, f"no session {session_id}")
        if handle.tick_task is not None:
            handle.tick_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await handle.tick_task
        handle.session.close()
        return {"closed": session_id}

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(ws: WebSocket, session_id: str):
        handle = registry.get(session_id)
        if handle is None:
            await ws.close(code=4404)
            return
        await ws.accept()
        loop = asyncio.get_running_loop()
        queue: asyncio.Queue = asyncio.Queue()

        def forward(event: dict) -> None:
            # channel callbacks may fire from worker threads (runner) as well
            # as the event loop; route through the loop either way
            loop.call_soon_threadsafe(queue.put_nowait, event)

        handle.session.channel.subscribe(forward)
        handle.sockets.add(ws)

        async def sender():
            while True:
                event = await queue.get()
                await ws.send_json(event)

        async def receiver():
            while True:
                message = await ws.receive_json()
                await _apply_ws_message(handle, ws, message)

        sender_task = asyncio.create_task(sender())
        try:
            await receiver()
        except WebSocketDisconnect:
            pass
        finally:
            sender_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sender_task
            handle.sockets.discard(ws)

    async def _apply_ws_message(handle: SessionHandle, ws: WebSocket, message: dict) -> None:
        kind = message.get("type")
        session = handle.session
        try:
            async with handle.lock:
                if kind == "stroke":
                    result = session.add_stroke(message["stroke"], t=message.get("t"))
                elif kind == "touch":
                    result = session.apply_touch(message["samples"], t=message.get("t"))
                elif kind == "select":
                    result = session.select(tuple(message["rect"]))
                elif kind == "erase":
                    result = {
                        "removed": session.erase(
                            [tuple(p) for p in message["path"]],
                            message.get("radius", 8.0),
                            t=message.get("t"),
                        )
                    }
                elif kind == "transform":
                    result = session.set_transform(
                        message["transform"], t=message.get("t")
                    ).to_dict()
                elif kind == "description":
                    result = session.edit_description(
                        message["text"], t=message.get("t")
                    ).to_dict()
                elif kind == "tick":
                    session.tick(message.get("now"))
                    result = {"ticked": True}
                else:
                    await ws.send_json({"type": "error", "op": kind, "message": "unknown type"})
                    return
        except (MalformedStroke, KeyError, ValueError, OcrUnavailable) as exc:
            await ws.send_json({"type": "error", "op": kind, "message": str(exc)})
            return
        await ws.send_json({"type": "ack", "op": kind, "result": result})

    return app


app = create_app()
