"""Render a session record into summary figures and a delimited event table.

Output goes to a directory next to the record (or wherever --out-dir says):
events.csv plus three PNG figures. Everything is derived from the log
alone, so a report can be built long after the session ended.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .session import _load_record

_INK_COLORS = {
    "freeform": "#1f77b4",
    "replace": "#d62728",
    "delete": "#9467bd",
    "add": "#2ca02c",
    "reference": "#ff7f0e",
    "eraser": "#7f7f7f",
}


def _summary(event: dict) -> str:
    kind = event["event"]
    data = event.get("data", {})
    if kind == "stroke_added":
        stroke = data.get("stroke", {})
        return f"{stroke.get('brush', '?')} stroke, {len(stroke.get('points', []))} points"
    if kind == "interpretation_published":
        interp = data.get("interpretation", {})
        action = interp.get("action", {})
        return f"{interp.get('id')}: {action.get('kind')} {(action.get('description') or '')[:60]}"
    if kind == "commit":
        staged = data.get("staged", {})
        return f"{len(staged.get('hunks', []))} hunks from {data.get('interpretation_id')}"
    if kind == "hunk_resolved":
        return f"hunk {data.get('index')} {data.get('decision')}"
    if kind == "finalize":
        return f"-> {data.get('version_id')} ({'accepted' if data.get('accepted') else 'rejected'})"
    if kind == "run":
        result = data.get("result", {})
        return f"exit={result.get('exit')} images={len(result.get('images', []))}"
    if kind == "erase":
        return f"removed {len(data.get('removed', []))} strokes"
    if kind in ("file_switched", "file_added"):
        return data.get("path", "")
    return ""


def _write_events_csv(events: list[dict], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seq", "t_ms", "event", "summary"])
        for event in events:
            writer.writerow(
                [event["seq"], f"{event['t']:.1f}", event["event"], _summary(event)]
            )


def _figure_timeline(events: list[dict], path: Path) -> None:
    kinds = sorted({e["event"] for e in events})
    index = {k: i for i, k in enumerate(kinds)}
    fig, ax = plt.subplots(figsize=(10, max(2.5, 0.4 * len(kinds) + 1)))
    xs = [e["t"] / 1000.0 for e in events]
    ys = [index[e["event"]] for e in events]
    ax.scatter(xs, ys, s=18, c="#1f77b4", alpha=0.8)
    ax.set_yticks(range(len(kinds)))
    ax.set_yticklabels(kinds)
    ax.set_xlabel("session time (s)")
    ax.set_title("event timeline")
    ax.grid(axis="x", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _figure_ink(events: list[dict], path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 6))
    seen: set[str] = set()
    for event in events:
        if event["event"] != "stroke_added":
            continue
        stroke = event["data"]["stroke"]
        brush = stroke.get("brush", "freeform")
        pts = stroke.get("points", [])
        if not pts:
            continue
        color = _INK_COLORS.get(brush, "#333333")
        ax.plot(
            [p[0] for p in pts],
            [p[1] for p in pts],
            color=color,
            linewidth=1.4,
            label=brush if brush not in seen else None,
        )
        seen.add(brush)
    ax.invert_yaxis()  # canvas y grows downward
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_title("ink by brush")
    if seen:
        ax.legend(loc="upper right", fontsize=8)
    else:
        ax.text(0.5, 0.5, "no ink", ha="center", va="center", transform=ax.transAxes)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _figure_outcomes(events: list[dict], path: Path) -> None:
    commits = [e for e in events if e["event"] == "commit"]
    labels, accepted, rejected, pending = [], [], [], []
    decisions: dict[int, dict[int, str]] = {}
    commit_index = -1
    for event in events:
        if event["event"] == "commit":
            commit_index += 1
            decisions[commit_index] = {}
        elif event["event"] == "hunk_resolved" and commit_index >= 0:
            decisions[commit_index][event["data"]["index"]] = event["data"]["decision"]
    for i, event in enumerate(commits):
        hunks = event["data"].get("staged", {}).get("hunks", [])
        resolved = decisions.get(i, {})
        labels.append(f"c{i + 1}")
        accepted.append(sum(1 for d in resolved.values() if d == "accept"))
        rejected.append(sum(1 for d in resolved.values() if d == "reject"))
        pending.append(max(0, len(hunks) - len(resolved)))
    fig, ax = plt.subplots(figsize=(6, 4))
    if labels:
        ax.bar(labels, accepted, label="accepted", color="#2ca02c")
        ax.bar(labels, rejected, bottom=accepted, label="rejected", color="#d62728")
        bottoms = [a + r for a, r in zip(accepted, rejected)]
        ax.bar(labels, pending, bottom=bottoms, label="pending", color="#bbbbbb")
        ax.legend(fontsize=8)
        ax.set_ylabel("hunks")
    else:
        ax.text(0.5, 0.5, "no commits", ha="center", va="center", transform=ax.transAxes)
    ax.set_title("staged hunk outcomes per commit")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def generate_report(record_path: str | Path, out_dir: str | Path | None = None) -> list[Path]:
    record_path = Path(record_path)
    events = _load_record(record_path)
    if out_dir is None:
        out_dir = record_path.with_suffix("").parent / (record_path.stem + ".report")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    written = []
    csv_path = out_dir / "events.csv"
    _write_events_csv(events, csv_path)
    written.append(csv_path)
    for name, builder in (
        ("timeline.png", _figure_timeline),
        ("ink.png", _figure_ink),
        ("outcomes.png", _figure_outcomes),
    ):
        fig_path = out_dir / name
        builder(events, fig_path)
        written.append(fig_path)
    return written
