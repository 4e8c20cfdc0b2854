"""Pluggable model and OCR client boundary.

The interpretation pipeline talks to two services: a code-editing model
(scene + code + constraints + history in, structured edit proposal out) and
a handwriting recognizer. Both ship with deterministic in-process mocks so
everything downstream of the boundary is testable offline: the model mock is
keyed by scene content hash, the OCR mock by a hash of the stroke geometry.

Remote responses are rejected unless they validate against the bundled JSON
schema; a misbehaving endpoint surfaces as ModelUnavailable rather than as
corrupt state further down.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources

import httpx
import jsonschema

from .ink import Stroke


class ModelUnavailable(Exception):
    """Stage-4 model call failed (network, HTTP, or schema violation)."""


class OcrUnavailable(Exception):
    """Handwriting recognition call failed; stage 3 degrades without text."""


def _load_schema() -> dict:
    text = resources.files("inkedit").joinpath("schemas/model_response.schema.json").read_text()
    return json.loads(text)


_RESPONSE_SCHEMA = _load_schema()
_VALIDATOR = jsonschema.Draft202012Validator(_RESPONSE_SCHEMA)


def validate_model_response(obj: dict) -> None:
    """Raises jsonschema.ValidationError when obj violates the contract."""
    _VALIDATOR.validate(obj)


def noop_response(code: str) -> dict:
    """The response an unprimed mock returns: nothing recognized, code kept."""
    return {
        "recognized_items": [],
        "action": {"kind": "reference_only", "description": ""},
        "referenced_lines": [],
        "affected_lines": [],
        "proposed_full_code": code,
    }


def stroke_group_hash(strokes: list[Stroke]) -> str:
    """Geometry-only digest of a stroke group, stable across sessions and
    stroke ids (OCR mock key)."""
    payload = [
        [[round(x, 2), round(y, 2)] for x, y, _ in s.points] for s in strokes
    ]
    blob = json.dumps(payload, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


class MockModelClient:
    """Deterministic model stand-in: canned responses by scene hash."""

    def __init__(self, responses: dict[str, dict] | None = None):
        self.responses: dict[str, dict] = {}
        for key, resp in (responses or {}).items():
            self.register(key, resp)
        self.calls = 0

    def register(self, scene_hash: str, response: dict) -> None:
        validate_model_response(response)
        self.responses[scene_hash] = response

    def load_fixture(self, path) -> None:
        with open(path, encoding="utf-8") as fh:
            for key, resp in json.load(fh).items():
                self.register(key, resp)

    def interpret(self, request: dict) -> dict:
        self.calls += 1
        response = self.responses.get(request["scene_hash"])
        if response is None:
            response = noop_response(request["code"])
        return json.loads(json.dumps(response))


class RemoteModelClient:
    def __init__(self, endpoint: str, api_key: str | None = None, timeout_s: float = 60.0):
        if not endpoint:
            raise ValueError("remote model requires an endpoint")
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout_s = timeout_s

    def interpret(self, request: dict) -> dict:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        try:
            reply = httpx.post(
                self.endpoint, json=request, headers=headers, timeout=self.timeout_s
            )
            reply.raise_for_status()
            obj = reply.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise ModelUnavailable(str(exc)) from exc
        try:
            validate_model_response(obj)
        except jsonschema.ValidationError as exc:
            raise ModelUnavailable(f"invalid model response: {exc.message}") from exc
        return obj


class MockOcrClient:
    """Deterministic OCR stand-in: canned text items by stroke-geometry hash."""

    def __init__(self, responses: dict[str, list] | None = None):
        self.responses = dict(responses or {})
        self.calls = 0

    def register(self, group_hash: str, items: list[dict]) -> None:
        self.responses[group_hash] = items

    def load_fixture(self, path) -> None:
        with open(path, encoding="utf-8") as fh:
            self.responses.update(json.load(fh))

    def recognize(self, strokes: list[Stroke]) -> list[dict]:
        self.calls += 1
        items = self.responses.get(stroke_group_hash(strokes), [])
        return json.loads(json.dumps(items))


class RemoteOcrClient:
    def __init__(self, endpoint: str, api_key: str | None = None, timeout_s: float = 30.0):
        if not endpoint:
            raise ValueError("remote OCR requires an endpoint")
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout_s = timeout_s

    def recognize(self, strokes: list[Stroke]) -> list[dict]:
        payload = {"strokes": [s.to_wire() for s in strokes]}
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        try:
            reply = httpx.post(
                self.endpoint, json=payload, headers=headers, timeout=self.timeout_s
            )
            reply.raise_for_status()
            items = reply.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise OcrUnavailable(str(exc)) from exc
        if not isinstance(items, list):
            raise OcrUnavailable("OCR endpoint must return a list of items")
        return items
