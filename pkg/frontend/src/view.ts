// ViewState: everything the screen shows, derived from server events plus
// the local tool selection. The server owns code, diffs, and gesture
// meaning; this file just folds its events into a plain object.

import type {
  Brush,
  FeedforwardEvent,
  GutterMark,
  HunkWire,
  InterpretationWire,
  RunResultWire,
  ServerEvent,
  StrokeWire,
} from "./types.js";

export type ToolKind = "pen" | "eraser" | "pointer";

export interface Tool {
  kind: ToolKind;
  brush: Brush;
  color: string;
  width: number;
}

export interface InkEntry {
  stroke: StrokeWire;
  confirmed: boolean; // optimistic echo until the server acks the id
}

export interface Highlight {
  startLine: number;
  endLine: number;
  expiresAt: number;
}

export interface ViewState {
  transform: { scrollY: number; zoom: number; lineHeight: number };
  code: { text: string; versionId: string };
  ink: Map<string, InkEntry>;
  feedforward: { stage: string; interpretation: InterpretationWire | null } | null;
  gutter: GutterMark[];
  staged: { hunks: HunkWire[]; unified: string } | null;
  highlights: Highlight[];
  console: RunResultWire | null;
  tool: Tool;
  textMode: boolean; // soft-keyboard editing; sketch is the default mode
}

export function initialViewState(): ViewState {
  return {
    transform: { scrollY: 0, zoom: 1, lineHeight: 20 },
    code: { text: "", versionId: "v1" },
    ink: new Map(),
    feedforward: null,
    gutter: [],
    staged: null,
    highlights: [],
    console: null,
    tool: { kind: "pen", brush: "freeform", color: "#1a1a1aff", width: 2 },
    textMode: false,
  };
}

export function echoStroke(state: ViewState, stroke: StrokeWire): void {
  state.ink.set(stroke.id, { stroke, confirmed: false });
}

export function dropStrokes(state: ViewState, ids: string[]): void {
  for (const id of ids) state.ink.delete(id);
}

/** Fold one server event into the state. Returns true if anything changed. */
export function applyServerEvent(state: ViewState, event: ServerEvent): boolean {
  switch (event.type) {
    case "feedforward": {
      const ff = event as FeedforwardEvent;
      state.feedforward = { stage: ff.stage, interpretation: ff.interpretation };
      // While an interpretation is live, referenced ranges show as vertical
      // glyphs. A later gutter event (the server's merged view) replaces them.
      if (ff.interpretation) {
        state.gutter = referencedGlyphs(ff.interpretation.referenced_lines);
      }
      return true;
    }
    case "gutter":
      state.gutter = event.decorations ?? [];
      return true;
    case "staged_diff":
      state.staged = { hunks: event.staged.hunks, unified: event.unified };
      return true;
    case "transient_highlight":
      for (const [start, end] of event.ranges) {
        state.highlights.push({ startLine: start, endLine: end, expiresAt: event.expires_at });
      }
      return true;
    case "run_output":
      state.console = event.result;
      return true;
    case "ack":
      return applyAck(state, event.op, event.result);
    default:
      return false;
  }
}

function applyAck(state: ViewState, op: string, result: unknown): boolean {
  if (op === "stroke") {
    const id = (result as { stroke_id?: string })?.stroke_id;
    const entry = id ? state.ink.get(id) : undefined;
    if (entry) {
      entry.confirmed = true; // server-confirmed stroke replaces the echo
      return true;
    }
    return false;
  }
  if (op === "erase") {
    const removed = (result as { removed?: string[] })?.removed ?? [];
    dropStrokes(state, removed);
    return removed.length > 0;
  }
  if (op === "transform") {
    const transform = result as { scroll_y?: number; zoom?: number; line_height?: number };
    if (transform.scroll_y !== undefined) state.transform.scrollY = transform.scroll_y;
    if (transform.zoom !== undefined) state.transform.zoom = transform.zoom;
    if (transform.line_height !== undefined) state.transform.lineHeight = transform.line_height;
    return true;
  }
  return false;
}

function referencedGlyphs(ranges: [number, number][]): GutterMark[] {
  const lines = new Set<number>();
  for (const [start, end] of ranges) {
    for (let line = start; line <= end; line++) lines.add(line);
  }
  return [...lines].sort((a, b) => a - b).map((line) => ({ line, mark: "referenced" as const }));
}

export function expireHighlights(state: ViewState, now: number): boolean {
  const before = state.highlights.length;
  state.highlights = state.highlights.filter((h) => now < h.expiresAt);
  return state.highlights.length !== before;
}
