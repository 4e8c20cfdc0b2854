// Shared test plumbing: a scriptable socket and a polling wait.

import type { SocketLike } from "../src/api.js";

export class FakeSocket implements SocketLike {
  readyState = 0; // CONNECTING until open() is called
  sent: string[] = [];
  private handlers = new Map<string, ((event: any) => void)[]>();

  constructor(readonly url: string = "ws://fake") {}

  addEventListener(type: string, handler: (event: any) => void): void {
    const list = this.handlers.get(type) ?? [];
    list.push(handler);
    this.handlers.set(type, list);
  }

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.readyState = 3;
    this.fire("close", {});
  }

  /** Simulate the connection completing. */
  open(): void {
    this.readyState = 1;
    this.fire("open", {});
  }

  /** Simulate a server frame. */
  receive(event: unknown): void {
    this.fire("message", { data: JSON.stringify(event) });
  }

  sentJson(): any[] {
    return this.sent.map((frame) => JSON.parse(frame));
  }

  private fire(type: string, event: unknown): void {
    for (const handler of this.handlers.get(type) ?? []) handler(event);
  }
}

export async function waitFor(
  cond: () => boolean,
  label = "condition",
  timeoutMs = 30_000,
): Promise<void> {
  const start = Date.now();
  while (!cond()) {
    if (Date.now() - start > timeoutMs) throw new Error(`timed out waiting for ${label}`);
    await new Promise((resolve) => setTimeout(resolve, 10));
  }
}
