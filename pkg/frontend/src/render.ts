// DOM rendering. Every region rebuilds from ViewState; nothing in here
// computes diffs, classifies gestures, or edits code on its own.

import type { HunkWire } from "./types.js";
import type { ViewState } from "./view.js";

export interface RenderHandlers {
  resolveHunk(index: number, decision: "accept" | "reject"): void;
  editDescription(text: string): void;
}

const BRUSH_COLORS: Record<string, string> = {
  "cmd:reference": "#ff7f0e",
  "cmd:add": "#2ca02c",
  "cmd:delete": "#9467bd",
  "cmd:replace": "#d62728",
};

const BRUSH_BADGES: Record<string, string> = {
  "cmd:reference": "ref",
  "cmd:add": "add",
  "cmd:delete": "del",
  "cmd:replace": "rep",
};

export function mountUi(root: HTMLElement): void {
  root.classList.add("inkedit-app");
  root.innerHTML = `
    <div class="toolbar">
      <span class="palette">
        <button type="button" data-brush="freeform" class="active">pen</button>
        <button type="button" data-brush="cmd:reference">reference</button>
        <button type="button" data-brush="cmd:add">add</button>
        <button type="button" data-brush="cmd:delete">delete</button>
        <button type="button" data-brush="cmd:replace">replace</button>
        <button type="button" data-tool="eraser">eraser</button>
      </span>
      <span class="actions">
        <button type="button" data-action="commit">commit</button>
        <button type="button" data-action="finalize">keep</button>
        <button type="button" data-action="run">run</button>
        <button type="button" data-action="undo">undo</button>
        <button type="button" data-action="redo">redo</button>
        <button type="button" data-action="mode">text mode</button>
      </span>
    </div>
    <div class="workspace">
      <div class="gutter"></div>
      <div class="code-pane"></div>
      <svg class="ink-layer" xmlns="http://www.w3.org/2000/svg"></svg>
    </div>
    <div class="diff-pane"></div>
    <div class="console-pane"></div>
    <div class="feedforward-panel panel-lower-right" style="position: fixed; bottom: 1rem; right: 1rem;"></div>
  `;
}

function lines(text: string): string[] {
  return text.split("\n");
}

export function renderCode(root: HTMLElement, state: ViewState): void {
  const pane = root.querySelector(".code-pane")!;
  pane.innerHTML = "";
  lines(state.code.text).forEach((content, i) => {
    const line = i + 1;
    const row = document.createElement("div");
    row.className = "code-line";
    row.dataset.line = String(line);
    row.textContent = content;
    if (state.highlights.some((h) => h.startLine <= line && line <= h.endLine)) {
      row.classList.add("transient-highlight");
    }
    if (state.textMode) row.setAttribute("contenteditable", "true");
    pane.appendChild(row);
  });
}

export function renderGutter(root: HTMLElement, state: ViewState): void {
  const gutter = root.querySelector(".gutter")!;
  gutter.innerHTML = "";
  const marks = new Map(state.gutter.map((d) => [d.line, d.mark]));
  lines(state.code.text).forEach((_, i) => {
    const line = i + 1;
    const cell = document.createElement("div");
    cell.className = "gutter-cell";
    cell.dataset.line = String(line);
    const mark = marks.get(line);
    if (mark) {
      const glyph = document.createElement("span");
      glyph.className = `glyph glyph-${mark}`;
      glyph.textContent = mark === "affected" ? "▌" : "│";
      cell.appendChild(glyph);
    }
    gutter.appendChild(cell);
  });
}

export function renderInk(root: HTMLElement, state: ViewState): void {
  const layer = root.querySelector(".ink-layer")!;
  layer.innerHTML = "";
  const ns = "http://www.w3.org/2000/svg";
  for (const { stroke, confirmed } of state.ink.values()) {
    const poly = document.createElementNS(ns, "polyline");
    poly.setAttribute("points", stroke.points.map(([x, y]) => `${x},${y}`).join(" "));
    poly.setAttribute("fill", "none");
    poly.setAttribute("stroke", BRUSH_COLORS[stroke.brush] ?? stroke.color);
    poly.setAttribute("stroke-width", String(stroke.width));
    poly.setAttribute("data-stroke-id", stroke.id);
    poly.setAttribute("class", confirmed ? "ink confirmed" : "ink echo");
    layer.appendChild(poly);
    const badge = BRUSH_BADGES[stroke.brush];
    if (badge) {
      const [x, y] = stroke.points[0] ?? [0, 0];
      const label = document.createElementNS(ns, "text");
      label.setAttribute("x", String(x));
      label.setAttribute("y", String(y - 4));
      label.setAttribute("class", "brush-badge");
      label.textContent = badge;
      layer.appendChild(label);
    }
  }
}

export function renderFeedforward(root: HTMLElement, state: ViewState, handlers: RenderHandlers): void {
  const panel = root.querySelector(".feedforward-panel")!;
  panel.innerHTML = "";
  if (!state.feedforward) return;
  const { stage, interpretation } = state.feedforward;

  const stageRow = document.createElement("div");
  stageRow.className = "ff-stage";
  stageRow.textContent = stage;
  panel.appendChild(stageRow);
  if (!interpretation) return;

  const recognized = document.createElement("div");
  recognized.className = "ff-recognized";
  recognized.textContent = interpretation.recognized_items
    .map((item) => `${item.kind}:${item.content}`)
    .join(" ");
  panel.appendChild(recognized);

  const description = document.createElement("input");
  description.className = "ff-description";
  description.value = interpretation.action?.description ?? "";
  description.addEventListener("change", () => handlers.editDescription(description.value));
  panel.appendChild(description);

  const ranges = document.createElement("div");
  ranges.className = "ff-ranges";
  const show = (pairs: [number, number][]) => pairs.map(([a, b]) => `${a}-${b}`).join(",");
  ranges.textContent = `refs ${show(interpretation.referenced_lines)} | edits ${show(interpretation.affected_lines)}`;
  panel.appendChild(ranges);

  for (const diagnostic of interpretation.diagnostics) {
    const row = document.createElement("div");
    row.className = "ff-diagnostic";
    row.textContent = diagnostic;
    panel.appendChild(row);
  }
}

function hunkBaseLines(state: ViewState, hunk: HunkWire): string[] {
  if (hunk.base_end < hunk.base_start) return [];
  return lines(state.code.text).slice(hunk.base_start - 1, hunk.base_end);
}

export function renderDiff(root: HTMLElement, state: ViewState, handlers: RenderHandlers): void {
  const pane = root.querySelector(".diff-pane")!;
  pane.innerHTML = "";
  if (!state.staged) return;
  state.staged.hunks.forEach((hunk, index) => {
    const widget = document.createElement("div");
    widget.className = `hunk hunk-${hunk.state}`;
    widget.dataset.index = String(index);

    const header = document.createElement("div");
    header.className = "hunk-header";
    header.textContent =
      hunk.base_end < hunk.base_start
        ? `insert before line ${hunk.base_start}`
        : `lines ${hunk.base_start}–${hunk.base_end}`;
    widget.appendChild(header);

    for (const old of hunkBaseLines(state, hunk)) {
      const row = document.createElement("div");
      row.className = "diff-line del";
      row.textContent = old;
      widget.appendChild(row);
    }
    for (const added of hunk.replacement) {
      const row = document.createElement("div");
      row.className = "diff-line ins";
      row.textContent = added;
      widget.appendChild(row);
    }

    const accept = document.createElement("button");
    accept.type = "button";
    accept.className = "hunk-accept";
    accept.textContent = "accept";
    const reject = document.createElement("button");
    reject.type = "button";
    reject.className = "hunk-reject";
    reject.textContent = "reject";
    if (hunk.state !== "pending") {
      accept.disabled = true;
      reject.disabled = true;
    }
    accept.addEventListener("click", () => handlers.resolveHunk(index, "accept"));
    reject.addEventListener("click", () => handlers.resolveHunk(index, "reject"));
    widget.appendChild(accept);
    widget.appendChild(reject);
    pane.appendChild(widget);
  });
}

export function renderConsole(root: HTMLElement, state: ViewState): void {
  const pane = root.querySelector(".console-pane")!;
  pane.innerHTML = "";
  if (!state.console) return;
  if (state.console.stdout) {
    const out = document.createElement("pre");
    out.className = "console-stdout";
    out.textContent = state.console.stdout;
    pane.appendChild(out);
  }
  if (state.console.stderr) {
    const err = document.createElement("pre");
    err.className = "console-stderr";
    err.textContent = state.console.stderr;
    pane.appendChild(err);
  }
  for (const image of state.console.images) {
    const img = document.createElement("img");
    img.className = "console-image";
    img.src = `data:image/${image.format};base64,${image.data}`;
    pane.appendChild(img);
  }
}

export function renderAll(root: HTMLElement, state: ViewState, handlers: RenderHandlers): void {
  renderCode(root, state);
  renderGutter(root, state);
  renderInk(root, state);
  renderFeedforward(root, state, handlers);
  renderDiff(root, state, handlers);
  renderConsole(root, state);
}
