"""Composes the picture the interpreting model sees: grayscale code raster,
colored ink overlay, a labeled coordinate grid, and console output panels,
all embedded in one SVG document.

Rendering is fully deterministic: glyph bitmaps are pinned (glyphs module),
rasters are encoded by a fixed PNG writer, and all geometry is formatted
through one number formatter, so identical inputs hash identically.

The scene lives in document space (canvas ink is un-zoomed/un-scrolled
before rasterizing), which makes grid row k coincide exactly with code
line k regardless of the viewer's transform.
"""

from __future__ import annotations

import base64
import hashlib
import math
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .glyphs import GLYPH_HEIGHT, GLYPH_WIDTH, GLYPHS
from .ink import CanvasTransform, Rect, Stroke

MAX_WIDTH = 4096
MAX_HEIGHT = 8192
GRID_COLUMN_CHARS = 8
CONSOLE_IMAGE_MAX_WIDTH = 512
CONSOLE_TEXT_TAIL = 40  # panels show at most this many trailing lines
CONSOLE_TEXT_COLS = 120
_CODE_GRAY = 90
_PANEL_GAP = 8.0
_MIN_GUTTER = 48.0


class RenderOverflow(Exception):
    """Scene exceeds the pixel budget."""


class OutOfBounds(Exception):
    """Queried bbox lies entirely outside the scene."""


_GLYPH_ARRAYS = {
    ch: np.array(
        [[(row >> x) & 1 for x in range(GLYPH_WIDTH)] for row in rows], dtype=bool
    )
    for ch, rows in GLYPHS.items()
}
_FALLBACK_GLYPH = _GLYPH_ARRAYS["?"]


def _fmt(v: float) -> str:
    r = round(v, 2)
    return str(int(r)) if r == int(r) else f"{r:g}"


def encode_png(array: np.ndarray) -> bytes:
    """Minimal PNG writer for uint8 grayscale (h,w) or RGBA (h,w,4)."""
    h, w = array.shape[:2]
    color_type = 0 if array.ndim == 2 else 6
    rows = np.ascontiguousarray(array).reshape(h, -1)
    filtered = np.concatenate([np.zeros((h, 1), np.uint8), rows], axis=1)

    def chunk(tag: bytes, data: bytes) -> bytes:
        body = tag + data
        return struct.pack(">I", len(data)) + body + struct.pack(">I", zlib.crc32(body))

    ihdr = struct.pack(">IIBBBBB", w, h, 8, color_type, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(filtered.tobytes(), 6))
        + chunk(b"IEND", b"")
    )


def png_size(data: bytes) -> tuple[int, int] | None:
    if len(data) >= 24 and data[:8] == b"\x89PNG\r\n\x1a\n" and data[12:16] == b"IHDR":
        return (
            int.from_bytes(data[16:20], "big"),
            int.from_bytes(data[20:24], "big"),
        )
    return None


def _draw_text(gray: np.ndarray, x: int, y: int, text: str, value: int) -> None:
    h, w = gray.shape
    for i, ch in enumerate(text):
        if ch == " ":
            continue
        gx = x + i * GLYPH_WIDTH
        if gx + GLYPH_WIDTH > w or gx < 0 or y < 0 or y + GLYPH_HEIGHT > h:
            continue
        glyph = _GLYPH_ARRAYS.get(ch, _FALLBACK_GLYPH)
        cell = gray[y : y + GLYPH_HEIGHT, gx : gx + GLYPH_WIDTH]
        cell[glyph] = value


def _parse_color(color: str) -> tuple[int, int, int, int]:
    return tuple(int(color[i : i + 2], 16) for i in (1, 3, 5, 7))


def _stamp_strokes(ink: np.ndarray, strokes, to_doc, origin) -> None:
    """Paint each stroke as overlapping discs along its polyline, in draw
    order (later ink covers earlier ink)."""
    h, w = ink.shape[:2]
    ox, oy = origin
    for stroke in strokes:
        rgba = np.array(_parse_color(stroke.color), dtype=np.uint8)
        radius = max(stroke.width / 2.0, 0.5)
        ir = int(math.ceil(radius))
        span = np.arange(-ir, ir + 1)
        disc = (span[:, None] ** 2 + span[None, :] ** 2) <= radius * radius
        pts = [to_doc(p) for p in stroke.points]
        for (x0, y0), (x1, y1) in zip(pts, pts[1:] or pts):
            steps = max(2, int(math.hypot(x1 - x0, y1 - y0)) + 1)
            for t in np.linspace(0.0, 1.0, steps):
                cx = int(round(x0 + t * (x1 - x0) - ox))
                cy = int(round(y0 + t * (y1 - y0) - oy))
                ylo, yhi = max(0, cy - ir), min(h, cy + ir + 1)
                xlo, xhi = max(0, cx - ir), min(w, cx + ir + 1)
                if ylo >= yhi or xlo >= xhi:
                    continue
                sub = disc[ylo - (cy - ir) : yhi - (cy - ir), xlo - (cx - ir) : xhi - (cx - ir)]
                ink[ylo:yhi, xlo:xhi][sub] = rgba


def _data_uri(png: bytes, mime: str = "image/png") -> str:
    return f"data:{mime};base64," + base64.b64encode(png).decode("ascii")


@dataclass(frozen=True)
class Scene:
    width: float
    height: float
    svg: str
    content_hash: str
    transform: CanvasTransform
    line_count: int
    bounds: Rect  # document-space (x0, y0, w, h)
    column_pitch: float
    column_count: int


def compose_scene(
    document_text: str,
    sketch_layer: list[Stroke],
    console_outputs: list[dict],
    transform: CanvasTransform,
) -> Scene:
    """Render code + ink + grid + console panels into one SVG scene.

    console_outputs entries: {"kind":"text","text":...} or
    {"kind":"image","format":"png","data":<base64>}.
    """
    lines = document_text.split("\n")
    n_lines = len(lines)
    lh = transform.line_height
    cols = max((len(l) for l in lines), default=1)
    cols = max(cols, 1)
    code_w = cols * GLYPH_WIDTH
    gutter = max(transform.gutter_width, _MIN_GUTTER)
    col_pitch = GRID_COLUMN_CHARS * GLYPH_WIDTH
    n_grid_cols = max(1, math.ceil(code_w / col_pitch))

    ox, oy = transform.code_origin
    x0 = ox - gutter
    y0 = oy
    code_h = n_lines * lh

    panels = _layout_panels(console_outputs, ox, oy + code_h)
    total_h = code_h + sum(p["h"] + _PANEL_GAP for p in panels)
    width = gutter + n_grid_cols * col_pitch + _PANEL_GAP
    if width > MAX_WIDTH or total_h > MAX_HEIGHT:
        raise RenderOverflow(f"scene {_fmt(width)}x{_fmt(total_h)} exceeds budget")

    w_px = int(math.ceil(width))
    h_px = int(math.ceil(total_h))

    code_gray = np.full((int(math.ceil(code_h)), code_w), 255, dtype=np.uint8)
    pad = max(0, int((lh - GLYPH_HEIGHT) // 2))
    for k, line in enumerate(lines):
        _draw_text(code_gray, 0, int(k * lh) + pad, line[:cols], _CODE_GRAY)

    ink = np.zeros((h_px, w_px, 4), dtype=np.uint8)

    def to_doc(p):
        return (p[0] / transform.zoom, p[1] / transform.zoom + transform.scroll_y)

    _stamp_strokes(ink, [s for s in sketch_layer if not s.is_eraser], to_doc, (x0, y0))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w_px}" height="{h_px}" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {w_px} {h_px}">',
        f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{w_px}" height="{h_px}" fill="#ffffff"/>',
        f'<image id="code" x="{_fmt(ox)}" y="{_fmt(oy)}" width="{code_w}" '
        f'height="{_fmt(code_h)}" href="{_data_uri(encode_png(code_gray))}"/>',
        _grid_svg(x0, ox, oy, lh, n_lines, col_pitch, n_grid_cols, width),
    ]
    for i, panel in enumerate(panels):
        parts.append(_panel_svg(i, panel))
    parts.append(
        f'<image id="ink" x="{_fmt(x0)}" y="{_fmt(y0)}" width="{w_px}" height="{h_px}" '
        f'href="{_data_uri(encode_png(ink))}"/>'
    )
    parts.append("</svg>")
    svg = "\n".join(parts)

    return Scene(
        width=width,
        height=total_h,
        svg=svg,
        content_hash=hashlib.sha256(svg.encode("utf-8")).hexdigest(),
        transform=transform,
        line_count=n_lines,
        bounds=(x0, y0, width, total_h),
        column_pitch=float(col_pitch),
        column_count=n_grid_cols,
    )


def _grid_svg(x0, ox, oy, lh, n_lines, col_pitch, n_cols, width) -> str:
    rows = []
    right = ox + n_cols * col_pitch
    for k in range(n_lines + 1):
        y = oy + k * lh
        rows.append(
            f'<line x1="{_fmt(x0)}" y1="{_fmt(y)}" x2="{_fmt(right)}" y2="{_fmt(y)}" '
            f'stroke="#bbbbbb" stroke-width="0.5"/>'
        )
    for c in range(n_cols + 1):
        x = ox + c * col_pitch
        rows.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(oy)}" x2="{_fmt(x)}" '
            f'y2="{_fmt(oy + n_lines * lh)}" stroke="#bbbbbb" stroke-width="0.5"/>'
        )
    for k in range(1, n_lines + 1):
        y = oy + (k - 1) * lh + 0.7 * lh
        rows.append(
            f'<text data-line="{k}" x="{_fmt(x0 + 4)}" y="{_fmt(y)}" '
            f'font-size="10" fill="#888888">{k}</text>'
        )
    return '<g id="grid">\n' + "\n".join(rows) + "\n</g>"


def _layout_panels(console_outputs, x, y_start) -> list[dict]:
    panels = []
    y = y_start + _PANEL_GAP
    for out in console_outputs:
        if out.get("kind") == "image":
            data = base64.b64decode(out["data"])
            size = png_size(data)
            if size:
                w, h = size
                scale = min(1.0, CONSOLE_IMAGE_MAX_WIDTH / w)
                disp_w, disp_h = w * scale, h * scale
            else:
                disp_w, disp_h = CONSOLE_IMAGE_MAX_WIDTH, CONSOLE_IMAGE_MAX_WIDTH * 0.75
            fmt = out.get("format", "png")
            panels.append(
                {
                    "kind": "image",
                    "x": x,
                    "y": y,
                    "w": disp_w,
                    "h": disp_h,
                    "uri": _data_uri(data, f"image/{fmt}"),
                }
            )
            y += disp_h + _PANEL_GAP
        else:
            text_lines = out.get("text", "").split("\n")[-CONSOLE_TEXT_TAIL:]
            text_lines = [l[:CONSOLE_TEXT_COLS] for l in text_lines]
            pitch = GLYPH_HEIGHT + 3
            pw = max((len(l) for l in text_lines), default=1) * GLYPH_WIDTH + 8
            ph = len(text_lines) * pitch + 8
            gray = np.full((ph, pw), 245, dtype=np.uint8)
            for k, line in enumerate(text_lines):
                _draw_text(gray, 4, 4 + k * pitch, line, 40)
            panels.append(
                {
                    "kind": "text",
                    "x": x,
                    "y": y,
                    "w": float(pw),
                    "h": float(ph),
                    "uri": _data_uri(encode_png(gray)),
                }
            )
            y += ph + _PANEL_GAP
    return panels


def _panel_svg(index: int, panel: dict) -> str:
    return (
        f'<g id="console-{index}">'
        f'<rect x="{_fmt(panel["x"] - 1)}" y="{_fmt(panel["y"] - 1)}" '
        f'width="{_fmt(panel["w"] + 2)}" height="{_fmt(panel["h"] + 2)}" '
        f'fill="none" stroke="#999999" stroke-width="1"/>'
        f'<image x="{_fmt(panel["x"])}" y="{_fmt(panel["y"])}" '
        f'width="{_fmt(panel["w"])}" height="{_fmt(panel["h"])}" href="{panel["uri"]}"/>'
        f"</g>"
    )


def grid_coordinates(scene: Scene, bbox: Rect) -> tuple[tuple[int, int], tuple[int, int]]:
    """Inclusive (row range, column range) of grid cells a canvas-space bbox
    covers. Rows equal code lines. Partially outside bboxes are clamped;
    fully outside raises OutOfBounds."""
    t = scene.transform
    x0 = bbox[0] / t.zoom
    x1 = (bbox[0] + bbox[2]) / t.zoom
    y0 = bbox[1] / t.zoom + t.scroll_y
    y1 = (bbox[1] + bbox[3]) / t.zoom + t.scroll_y
    bx, by, bw, bh = scene.bounds
    if x1 < bx or x0 > bx + bw or y1 < by or y0 > by + bh:
        raise OutOfBounds("bbox lies outside the scene")
    ox, oy = t.code_origin

    def row(y: float) -> int:
        return math.floor((y - oy) / t.line_height) + 1

    def col(x: float) -> int:
        return math.floor((x - ox) / scene.column_pitch) + 1

    r0 = min(max(row(y0), 1), scene.line_count)
    r1 = min(max(row(y1), r0), scene.line_count)
    c0 = min(max(col(x0), 1), scene.column_count)
    c1 = min(max(col(x1), c0), scene.column_count)
    return ((r0, r1), (c0, c1))
