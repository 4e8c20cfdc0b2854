// Wire types for the session service. These mirror the server's JSON
// shapes exactly; the UI never invents fields of its own on this layer.

export type Brush =
  | "freeform"
  | "cmd:reference"
  | "cmd:add"
  | "cmd:delete"
  | "cmd:replace"
  | "eraser";

export interface StrokeWire {
  id: string;
  points: [number, number, number][]; // x, y, t(ms)
  input: string; // "pen" | "touch:N"
  brush: Brush;
  color: string; // #RRGGBB or #RRGGBBAA
  width: number;
}

export interface TouchSampleWire {
  finger: number;
  x: number;
  y: number;
  t: number;
  phase: "down" | "move" | "up";
}

export interface TransformWire {
  scroll_y?: number;
  zoom?: number;
  line_height?: number;
  gutter_width?: number;
}

export type ClientMessage =
  | { type: "stroke"; stroke: StrokeWire; t?: number }
  | { type: "touch"; samples: TouchSampleWire[]; t?: number }
  | { type: "erase"; path: [number, number][]; radius: number; t?: number }
  | { type: "transform"; transform: TransformWire; t?: number }
  | { type: "select"; rect: [number, number, number, number]; t?: number }
  | { type: "description"; text: string; t?: number }
  | { type: "tick"; now?: number };

export interface AckMessage {
  type: "ack";
  op: string;
  result: unknown;
}

export interface ErrorMessage {
  type: "error";
  op: string;
  message: string;
}

export interface InterpretationWire {
  id: string;
  revision: number;
  group_ids: string[];
  stage_status: Record<string, string>;
  recognized_items: RecognizedItem[];
  action: { kind: string; description: string; user_edited?: boolean } | null;
  referenced_lines: [number, number][];
  affected_lines: [number, number][];
  related_lines: number[];
  diagnostics: string[];
  proposed_full_code?: string | null;
  scene_hash?: string | null;
  decision?: string | null;
  [extra: string]: unknown;
}

export interface RecognizedItem {
  kind: string;
  content: string;
  bbox: [number, number, number, number];
  role: string;
}

export interface FeedforwardEvent {
  type: "feedforward";
  revision: number;
  cascade: number;
  stage: string;
  interpretation: InterpretationWire | null;
}

export interface GutterMark {
  line: number;
  mark: "referenced" | "affected";
}

export interface GutterEvent {
  type: "gutter";
  revision?: number;
  decorations: GutterMark[];
  [extra: string]: unknown;
}

export interface HunkWire {
  base_start: number;
  base_end: number;
  replacement: string[];
  state: "pending" | "accepted" | "rejected";
  [extra: string]: unknown;
}

export interface StagedDiffEvent {
  type: "staged_diff";
  staged: { hunks: HunkWire[]; [extra: string]: unknown };
  unified: string;
}

export interface TransientHighlightEvent {
  type: "transient_highlight";
  ranges: [number, number][];
  expires_at: number;
  [extra: string]: unknown;
}

export interface RunOutputEvent {
  type: "run_output";
  result: RunResultWire;
}

export interface RunResultWire {
  stdout: string;
  stderr: string;
  images: { format: string; data: string }[];
  exit: number | string;
  duration_ms: number;
}

export type ServerEvent =
  | FeedforwardEvent
  | GutterEvent
  | StagedDiffEvent
  | TransientHighlightEvent
  | RunOutputEvent
  | AckMessage
  | ErrorMessage;
