// Pointer input -> stream messages. Pen contacts become strokes (or erase
// paths), touch contacts are batched and shipped to the server for
// classification. The single exception, per the navigation-latency rule,
// is the two-finger pan: it is echoed locally while the fingers move and
// then sent as one transform update.

import type { ClientMessage, StrokeWire, TouchSampleWire } from "./types.js";
import type { Tool, ViewState } from "./view.js";

export interface PointerLike {
  id: number;
  kind: "pen" | "touch";
  x: number;
  y: number;
  t: number;
}

const PAN_SLOP_PX = 12;
const ERASE_RADIUS = 8;

interface PenState {
  strokeId: string;
  points: [number, number, number][];
}

interface TouchContact {
  finger: number;
  samples: TouchSampleWire[];
}

export class InkCapture {
  private pen: PenState | null = null;
  private contacts = new Map<number, TouchContact>();
  private batch: TouchSampleWire[] = [];
  private nextFinger = 1;
  private nextStroke = 1;
  private panning = false;
  private panAnchorY = 0;
  private panStartScroll = 0;

  constructor(
    private readonly out: (message: ClientMessage) => void,
    private readonly view: ViewState,
    private readonly onEcho?: (stroke: StrokeWire) => void,
  ) {}

  get tool(): Tool {
    return this.view.tool;
  }

  pointerDown(p: PointerLike): void {
    if (p.kind === "pen") {
      if (this.view.textMode || this.tool.kind === "pointer") return;
      this.pen = {
        strokeId: `u-${this.nextStroke++}`,
        points: [[p.x, p.y, p.t]],
      };
      return;
    }
    const contact: TouchContact = { finger: this.nextFinger++, samples: [] };
    this.contacts.set(p.id, contact);
    this.pushTouch(contact, p, "down");
    if (this.contacts.size === 2 && !this.panning) {
      this.panAnchorY = p.y;
      this.panStartScroll = this.view.transform.scrollY;
    }
  }

  pointerMove(p: PointerLike): void {
    if (p.kind === "pen") {
      this.pen?.points.push([p.x, p.y, p.t]);
      return;
    }
    const contact = this.contacts.get(p.id);
    if (!contact) return;
    this.pushTouch(contact, p, "move");
    if (this.contacts.size === 2) {
      const dy = p.y - this.panAnchorY;
      if (this.panning || Math.abs(dy) > PAN_SLOP_PX) {
        this.panning = true;
        // drag up scrolls the document down, mirroring the server's rule
        this.view.transform.scrollY = this.panStartScroll - dy;
      }
    }
  }

  pointerUp(p: PointerLike): void {
    if (p.kind === "pen") {
      this.finishPen(p);
      return;
    }
    const contact = this.contacts.get(p.id);
    if (!contact) return;
    this.pushTouch(contact, p, "up");
    this.contacts.delete(p.id);
    if (this.contacts.size === 0) this.finishTouchGesture(p.t);
  }

  private finishPen(p: PointerLike): void {
    const pen = this.pen;
    this.pen = null;
    if (!pen) return;
    const last = pen.points[pen.points.length - 1];
    if (!last || last[0] !== p.x || last[1] !== p.y) pen.points.push([p.x, p.y, p.t]);
    if (pen.points.length < 2) return; // a tap with no drag leaves no ink
    if (this.tool.kind === "eraser") {
      this.out({
        type: "erase",
        path: pen.points.map(([x, y]) => [x, y] as [number, number]),
        radius: ERASE_RADIUS,
        t: p.t,
      });
      return;
    }
    const stroke: StrokeWire = {
      id: pen.strokeId,
      points: pen.points,
      input: "pen",
      brush: this.tool.brush,
      color: this.tool.color,
      width: this.tool.width,
    };
    this.onEcho?.(stroke);
    this.out({ type: "stroke", stroke, t: p.t });
  }

  private pushTouch(contact: TouchContact, p: PointerLike, phase: TouchSampleWire["phase"]): void {
    const sample: TouchSampleWire = { finger: contact.finger, x: p.x, y: p.y, t: p.t, phase };
    contact.samples.push(sample);
    this.batch.push(sample);
  }

  private finishTouchGesture(t: number): void {
    const batch = this.batch;
    this.batch = [];
    this.nextFinger = 1;
    if (this.panning) {
      this.panning = false;
      this.out({
        type: "transform",
        transform: { scroll_y: this.view.transform.scrollY },
        t,
      });
      return;
    }
    if (batch.length > 0) this.out({ type: "touch", samples: batch, t });
  }
}

/**
 * Wire an InkCapture to a DOM element's pointer events. Coordinates are
 * relative to the element; pen and touch pointer types are kept apart, and
 * mouse input counts as pen so the UI stays usable on desktops.
 */
export function bindPointerEvents(element: HTMLElement, capture: InkCapture): () => void {
  const toPointer = (event: PointerEvent): PointerLike => {
    const box = element.getBoundingClientRect();
    return {
      id: event.pointerId,
      kind: event.pointerType === "touch" ? "touch" : "pen",
      x: event.clientX - box.left,
      y: event.clientY - box.top,
      t: event.timeStamp,
    };
  };
  const down = (e: PointerEvent) => capture.pointerDown(toPointer(e));
  const move = (e: PointerEvent) => {
    if (e.buttons !== 0 || e.pointerType === "touch") capture.pointerMove(toPointer(e));
  };
  const up = (e: PointerEvent) => capture.pointerUp(toPointer(e));
  element.addEventListener("pointerdown", down);
  element.addEventListener("pointermove", move);
  element.addEventListener("pointerup", up);
  return () => {
    element.removeEventListener("pointerdown", down);
    element.removeEventListener("pointermove", move);
    element.removeEventListener("pointerup", up);
  };
}
