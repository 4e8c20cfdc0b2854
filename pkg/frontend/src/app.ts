// Session wiring: boot a session, connect the stream, route pointer input
// out and server events into the view. Every public method here maps to
// exactly one service call.

import { HttpApi, Stream, type SocketFactory } from "./api.js";
import { bindPointerEvents, InkCapture } from "./capture.js";
import { mountUi, renderAll, renderCode, type RenderHandlers } from "./render.js";
import type { Brush, ClientMessage, ServerEvent } from "./types.js";
import {
  applyServerEvent,
  echoStroke,
  initialViewState,
  type ViewState,
} from "./view.js";

const HIGHLIGHT_TTL_MS = 1500;

export interface AppOptions {
  base: string;
  root: HTMLElement;
  files: Record<string, string>;
  activeFile?: string;
  manualClock?: boolean;
  config?: Record<string, unknown>;
  fetchImpl?: (url: string, init?: RequestInit) => Promise<Response>;
  makeSocket?: SocketFactory;
  /** Timestamp source for HTTP calls; undefined defers to the server clock. */
  clock?: () => number | undefined;
  /** Timer hook so tests can control highlight expiry. */
  setTimer?: (fn: () => void, ms: number) => unknown;
}

export class App {
  readonly state: ViewState = initialViewState();
  readonly capture: InkCapture;
  sessionId = "";
  private readonly handlers: RenderHandlers;
  private readonly now: () => number | undefined;
  private readonly setTimer: (fn: () => void, ms: number) => unknown;
  private unbind: (() => void) | null = null;

  constructor(
    readonly api: HttpApi,
    readonly stream: Stream,
    readonly root: HTMLElement,
    options: Pick<AppOptions, "clock" | "setTimer"> = {},
  ) {
    this.now = options.clock ?? (() => undefined);
    this.setTimer = options.setTimer ?? ((fn, ms) => setTimeout(fn, ms));
    this.capture = new InkCapture(
      (message) => this.sendMessage(message),
      this.state,
      (stroke) => {
        echoStroke(this.state, stroke);
        this.render();
      },
    );
    this.handlers = {
      resolveHunk: (index, decision) => void this.resolveHunk(index, decision),
      editDescription: (text) => void this.editDescription(text),
    };
  }

  static async boot(options: AppOptions): Promise<App> {
    const api = new HttpApi(options.base, options.fetchImpl);
    const created = await api.createSession({
      files: options.files,
      activeFile: options.activeFile,
      manualClock: options.manualClock,
      config: options.config,
    });
    const wsBase = options.base.replace(/^http/, "ws");
    const makeSocket =
      options.makeSocket ?? ((url: string) => new WebSocket(url) as unknown as never);
    const stream = new Stream(`${wsBase}/sessions/${created.session_id}/stream`, makeSocket);

    const app = new App(api, stream, options.root, options);
    app.sessionId = created.session_id;
    app.state.code.text = created.state.files[created.state.active_file].text;
    app.state.code.versionId = created.state.files[created.state.active_file].version_id;

    mountUi(options.root);
    app.bindToolbar();
    const surface = options.root.querySelector<HTMLElement>(".workspace")!;
    app.unbind = bindPointerEvents(surface, app.capture);
    stream.onEvent((event) => app.handleServerEvent(event));
    stream.connect();
    app.render();
    return app;
  }

  sendMessage(message: ClientMessage): void {
    this.stream.send(message);
  }

  handleServerEvent(event: ServerEvent): void {
    const before = this.state.highlights.length;
    const changed = applyServerEvent(this.state, event);
    if (event.type === "transient_highlight") {
      const mine = this.state.highlights.slice(before);
      this.setTimer(() => {
        this.state.highlights = this.state.highlights.filter((h) => !mine.includes(h));
        renderCode(this.root, this.state);
      }, HIGHLIGHT_TTL_MS);
    }
    if (changed) this.render();
  }

  render(): void {
    renderAll(this.root, this.state, this.handlers);
  }

  async commit(): Promise<void> {
    await this.api.commit(this.sessionId, this.now());
  }

  async resolveHunk(index: number, decision: "accept" | "reject"): Promise<void> {
    const reply = await this.api.resolveHunk(this.sessionId, index, decision, this.now());
    this.state.staged = { hunks: reply.staged.hunks, unified: this.state.staged?.unified ?? "" };
    this.render();
  }

  async finalizeStaged(): Promise<void> {
    const reply = await this.api.finalize(this.sessionId, this.now());
    this.state.code.text = reply.text;
    this.state.code.versionId = reply.version_id;
    this.state.staged = null;
    this.render();
  }

  async run(): Promise<void> {
    await this.api.run(this.sessionId, this.now());
  }

  async undo(): Promise<void> {
    await this.applyVersion(this.api.undo(this.sessionId, this.now()));
  }

  async redo(): Promise<void> {
    await this.applyVersion(this.api.redo(this.sessionId, this.now()));
  }

  private async applyVersion(reply: Promise<{ version_id: string; text: string }>): Promise<void> {
    const version = await reply;
    this.state.code.text = version.text;
    this.state.code.versionId = version.version_id;
    this.render();
  }

  async editDescription(text: string): Promise<void> {
    await this.api.editDescription(this.sessionId, text, this.now());
  }

  setBrush(brush: Brush): void {
    this.state.tool = { ...this.state.tool, kind: "pen", brush };
    this.markActiveTool(`[data-brush="${brush}"]`);
  }

  setEraser(): void {
    this.state.tool = { ...this.state.tool, kind: "eraser" };
    this.markActiveTool('[data-tool="eraser"]');
  }

  toggleTextMode(): void {
    this.state.textMode = !this.state.textMode;
    this.render();
  }

  private markActiveTool(selector: string): void {
    for (const button of this.root.querySelectorAll(".palette button")) {
      button.classList.remove("active");
    }
    this.root.querySelector(selector)?.classList.add("active");
  }

  private bindToolbar(): void {
    const on = (selector: string, fn: () => void) =>
      this.root.querySelector(selector)?.addEventListener("click", fn);
    for (const button of this.root.querySelectorAll<HTMLElement>("[data-brush]")) {
      button.addEventListener("click", () => this.setBrush(button.dataset.brush as Brush));
    }
    on('[data-tool="eraser"]', () => this.setEraser());
    on('[data-action="commit"]', () => void this.commit());
    on('[data-action="finalize"]', () => void this.finalizeStaged());
    on('[data-action="run"]', () => void this.run());
    on('[data-action="undo"]', () => void this.undo());
    on('[data-action="redo"]', () => void this.redo());
    on('[data-action="mode"]', () => this.toggleTextMode());
  }

  close(): void {
    this.unbind?.();
    this.stream.close();
  }
}
