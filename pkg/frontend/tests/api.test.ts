import { describe, expect, it } from "vitest";

import { ApiError, HttpApi, Stream } from "../src/api.js";
import type { ServerEvent } from "../src/types.js";
import { FakeSocket } from "./helpers.js";

interface Call {
  url: string;
  method: string;
  body: unknown;
}

function spyApi(replyBody: unknown = {}, status = 200) {
  const calls: Call[] = [];
  const fetchImpl = async (url: string, init?: RequestInit) => {
    calls.push({
      url,
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    const text = typeof replyBody === "string" ? replyBody : JSON.stringify(replyBody);
    return {
      ok: status >= 200 && status < 300,
      status,
      text: async () => text,
    } as unknown as Response;
  };
  return { calls, api: new HttpApi("http://service", fetchImpl) };
}

describe("HttpApi", () => {
  it("each method maps to exactly one documented endpoint", async () => {
    const { calls, api } = spyApi({ session_id: "s-1", state: {} });

    await api.createSession({ files: { "a.py": "x = 1\n" }, manualClock: true });
    await api.state("s-1");
    await api.advance("s-1", 3005, 601);
    await api.commit("s-1", 3200);
    await api.resolveHunk("s-1", 0, "accept", 3300);
    await api.resolveHunk("s-1", 1, "reject");
    await api.finalize("s-1", 3400);
    await api.run("s-1");
    await api.undo("s-1", 10);
    await api.redo("s-1", 20);
    await api.editDescription("s-1", "tighten the loop", 30);
    await api.addFile("s-1", "b.py");
    await api.switchFile("s-1", "b.py");
    await api.deleteSession("s-1");

    expect(calls.map((c) => [c.method, c.url])).toEqual([
      ["POST", "http://service/sessions"],
      ["GET", "http://service/sessions/s-1/state"],
      ["POST", "http://service/sessions/s-1/advance"],
      ["POST", "http://service/sessions/s-1/commit"],
      ["POST", "http://service/sessions/s-1/hunks/0/accept"],
      ["POST", "http://service/sessions/s-1/hunks/1/reject"],
      ["POST", "http://service/sessions/s-1/finalize"],
      ["POST", "http://service/sessions/s-1/run"],
      ["POST", "http://service/sessions/s-1/undo"],
      ["POST", "http://service/sessions/s-1/redo"],
      ["POST", "http://service/sessions/s-1/interpretation/description"],
      ["POST", "http://service/sessions/s-1/files"],
      ["POST", "http://service/sessions/s-1/files/switch"],
      ["DELETE", "http://service/sessions/s-1"],
    ]);
    // one UI-visible action, one call: nothing extra snuck in
    expect(calls).toHaveLength(14);
  });

  it("serializes bodies the way the service expects", async () => {
    const { calls, api } = spyApi({ session_id: "s-2", state: {} });
    await api.createSession({
      files: { "main.py": "pass\n" },
      manualClock: true,
      config: { model: "remote" },
    });
    await api.advance("s-2", 1500, 30);
    await api.commit("s-2", 3200);
    await api.commit("s-2"); // no timestamp: the server's clock decides
    await api.editDescription("s-2", "swap the accumulator");

    expect(calls[0]!.body).toEqual({
      files: { "main.py": "pass\n" },
      manual_clock: true,
      config: { model: "remote" },
    });
    expect(calls[1]!.body).toEqual({ ms: 1500, steps: 30 });
    expect(calls[2]!.body).toEqual({ t: 3200 });
    expect(calls[3]!.body).toEqual({});
    expect(calls[4]!.body).toEqual({ text: "swap the accumulator" });
  });

  it("log returns the raw body untouched", async () => {
    const raw = '{"seq": 1, "event": "session_created"}\n{"seq": 2, "event": "stroke_added"}\n';
    const { calls, api } = spyApi(raw);
    const log = await api.log("s-3");
    expect(log).toBe(raw);
    expect(calls[0]!.url).toBe("http://service/sessions/s-3/log");
  });

  it("error replies surface as ApiError with the service's detail", async () => {
    const { api } = spyApi({ detail: "nothing staged" }, 409);
    const failure = await api.commit("s-4").catch((error) => error);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.status).toBe(409);
    expect(failure.detail).toBe("nothing staged");
  });
});

describe("Stream", () => {
  function connected() {
    let socket!: FakeSocket;
    const stream = new Stream("ws://service/sessions/s-1/stream", (url) => {
      socket = new FakeSocket(url);
      return socket;
    });
    stream.connect();
    return { stream, socket };
  }

  it("buffers messages while the socket is still connecting, then flushes in order", () => {
    const { stream, socket } = connected();
    stream.send({ type: "tick" });
    stream.send({ type: "description", text: "a" });
    stream.send({ type: "description", text: "b" });
    expect(socket.sent).toHaveLength(0);
    expect(stream.buffered).toBe(3);

    socket.open();
    expect(stream.buffered).toBe(0);
    expect(socket.sentJson().map((m) => m.text ?? m.type)).toEqual(["tick", "a", "b"]);
  });

  it("sends straight through once open", () => {
    const { stream, socket } = connected();
    socket.open();
    stream.send({ type: "tick" });
    expect(socket.sent).toHaveLength(1);
    expect(stream.buffered).toBe(0);
  });

  it("delivers parsed server events to every listener", () => {
    const { stream, socket } = connected();
    const seen: ServerEvent[] = [];
    stream.onEvent((event) => seen.push(event));
    stream.onEvent((event) => seen.push(event));
    socket.open();
    socket.receive({ type: "gutter", decorations: [{ line: 2, mark: "affected" }] });
    expect(seen).toHaveLength(2);
    expect(seen[0]).toEqual({ type: "gutter", decorations: [{ line: 2, mark: "affected" }] });
  });

  it("a dropped socket buffers new messages instead of losing them", () => {
    const { stream, socket } = connected();
    socket.open();
    socket.close();
    stream.send({ type: "tick" });
    expect(stream.buffered).toBe(1);
    expect(socket.sent).toHaveLength(0);
  });
});
