// HTTP + stream plumbing. One method per documented endpoint; nothing in
// the UI talks to the service except through this file.

import type { ClientMessage, ServerEvent } from "./types.js";

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

export interface SessionCreateOptions {
  files: Record<string, string>;
  activeFile?: string;
  manualClock?: boolean;
  config?: Record<string, unknown>;
  logPath?: string;
}

export class HttpApi {
  constructor(
    readonly base: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async call(method: string, path: string, body?: unknown): Promise<any> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "Content-Type": "application/json" };
    }
    const reply = await this.fetchImpl(this.base + path, init);
    const text = await reply.text();
    if (!reply.ok) {
      let detail = text;
      try {
        detail = JSON.parse(text).detail ?? text;
      } catch {
        // non-JSON error body, keep raw text
      }
      throw new ApiError(reply.status, String(detail));
    }
    return text ? JSON.parse(text) : null;
  }

  createSession(opts: SessionCreateOptions): Promise<{ session_id: string; state: any }> {
    return this.call("POST", "/sessions", {
      files: opts.files,
      ...(opts.activeFile !== undefined && { active_file: opts.activeFile }),
      ...(opts.manualClock !== undefined && { manual_clock: opts.manualClock }),
      ...(opts.config !== undefined && { config: opts.config }),
      ...(opts.logPath !== undefined && { log_path: opts.logPath }),
    });
  }

  state(id: string): Promise<any> {
    return this.call("GET", `/sessions/${id}/state`);
  }

  advance(id: string, ms: number, steps = 1): Promise<any> {
    return this.call("POST", `/sessions/${id}/advance`, { ms, steps });
  }

  commit(id: string, t?: number): Promise<{ staged: any }> {
    return this.call("POST", `/sessions/${id}/commit`, t === undefined ? {} : { t });
  }

  resolveHunk(
    id: string,
    index: number,
    decision: "accept" | "reject",
    t?: number,
  ): Promise<{ staged: any }> {
    return this.call(
      "POST",
      `/sessions/${id}/hunks/${index}/${decision}`,
      t === undefined ? {} : { t },
    );
  }

  finalize(id: string, t?: number): Promise<{ version_id: string; text: string }> {
    return this.call("POST", `/sessions/${id}/finalize`, t === undefined ? {} : { t });
  }

  run(id: string, t?: number): Promise<{ result: any }> {
    return this.call("POST", `/sessions/${id}/run`, t === undefined ? {} : { t });
  }

  undo(id: string, t?: number): Promise<{ version_id: string; text: string }> {
    return this.call("POST", `/sessions/${id}/undo`, t === undefined ? {} : { t });
  }

  redo(id: string, t?: number): Promise<{ version_id: string; text: string }> {
    return this.call("POST", `/sessions/${id}/redo`, t === undefined ? {} : { t });
  }

  editDescription(id: string, text: string, t?: number): Promise<any> {
    return this.call("POST", `/sessions/${id}/interpretation/description`, {
      text,
      ...(t !== undefined && { t }),
    });
  }

  addFile(id: string, path: string, text = ""): Promise<{ files: string[] }> {
    return this.call("POST", `/sessions/${id}/files`, { path, text });
  }

  switchFile(id: string, path: string): Promise<{ active_file: string }> {
    return this.call("POST", `/sessions/${id}/files/switch`, { path });
  }

  log(id: string): Promise<string> {
    return this.fetchImpl(`${this.base}/sessions/${id}/log`).then((r) => {
      if (!r.ok) throw new ApiError(r.status, "log unavailable");
      return r.text();
    });
  }

  deleteSession(id: string): Promise<{ closed: string }> {
    return this.call("DELETE", `/sessions/${id}`);
  }
}

// Minimal surface we need from a WebSocket, so tests can hand us fakes and
// node can hand us the "ws" package.
export interface SocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  addEventListener(type: string, handler: (event: any) => void): void;
}

export type SocketFactory = (url: string) => SocketLike;

const SOCKET_OPEN = 1;

/**
 * The session stream. Messages sent while the socket is closed are held in
 * an outbox and flushed in order once it opens (pen ink drawn during a
 * disconnect must not be lost or reordered).
 */
export class Stream {
  private socket: SocketLike | null = null;
  private outbox: ClientMessage[] = [];
  private listeners: ((event: ServerEvent) => void)[] = [];

  constructor(
    private readonly url: string,
    private readonly makeSocket: SocketFactory,
  ) {}

  connect(): void {
    const socket = this.makeSocket(this.url);
    this.socket = socket;
    socket.addEventListener("open", () => this.flush());
    socket.addEventListener("message", (event: { data: unknown }) => {
      const parsed = JSON.parse(String(event.data)) as ServerEvent;
      for (const listener of this.listeners) listener(parsed);
    });
    socket.addEventListener("close", () => {
      if (this.socket === socket) this.socket = null;
    });
  }

  onEvent(listener: (event: ServerEvent) => void): void {
    this.listeners.push(listener);
  }

  get connected(): boolean {
    return this.socket !== null && this.socket.readyState === SOCKET_OPEN;
  }

  send(message: ClientMessage): void {
    this.outbox.push(message);
    this.flush();
  }

  get buffered(): number {
    return this.outbox.length;
  }

  private flush(): void {
    if (!this.connected) return;
    while (this.outbox.length > 0) {
      const next = this.outbox.shift()!;
      this.socket!.send(JSON.stringify(next));
    }
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }
}
