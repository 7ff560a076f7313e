import { describe, expect, it } from "vitest";

import { readSseStream } from "../src/api.js";

function streamOf(chunks: string[], opts: { stayOpen?: boolean } = {}): ReadableStream<Uint8Array> {
  const encoder = new TextEncoder();
  return new ReadableStream({
    start(controller) {
      for (const chunk of chunks) controller.enqueue(encoder.encode(chunk));
      if (!opts.stayOpen) controller.close();
    },
  });
}

async function collect(body: ReadableStream<Uint8Array>, signal?: AbortSignal) {
  const events: Array<{ event: string; data: string }> = [];
  for await (const frame of readSseStream(body, signal)) events.push(frame);
  return events;
}

describe("SSE reader", () => {
  it("parses frames regardless of chunk boundaries", async () => {
    const events = await collect(
      streamOf([
        "event: scope\nda",
        'ta: {"a":1}\n\nevent: view_done\nd',
        "ata: {}\n\n",
      ]),
    );
    expect(events).toEqual([
      { event: "scope", data: '{"a":1}' },
      { event: "view_done", data: "{}" },
    ]);
  });

  it("joins multi-line data fields with newlines", async () => {
    const events = await collect(streamOf(["event: x\ndata: a\ndata: b\n\n"]));
    expect(events).toEqual([{ event: "x", data: "a\nb" }]);
  });

  it("yields a final frame that lacks the trailing blank line", async () => {
    const events = await collect(streamOf(["event: x\ndata: tail"]));
    expect(events).toEqual([{ event: "x", data: "tail" }]);
  });

  it("ignores frames without data and defaults the event name", async () => {
    const events = await collect(streamOf(["event: lonely\n\n", "data: bare\n\n"]));
    expect(events).toEqual([{ event: "message", data: "bare" }]);
  });

  it("stops promptly when the signal aborts mid-stream", async () => {
    const controller = new AbortController();
    const body = streamOf(["event: x\ndata: 1\n\n"], { stayOpen: true });
    const consumed: string[] = [];
    const run = (async () => {
      for await (const frame of readSseStream(body, controller.signal)) {
        consumed.push(frame.data);
        controller.abort();
      }
    })();
    await expect(run).rejects.toMatchObject({ name: "AbortError" });
    expect(consumed).toEqual(["1"]);
  });
});
