// Typed client for the view service. Everything the editor knows about the
// backend goes through here: plain fetch for the document and prompt routes,
// a hand-rolled SSE reader for the cursor stream.

export interface WireRange {
  start: number;
  end: number;
}

export interface WireParagraph {
  index: number;
  range: WireRange;
  content_hash: string;
}

export interface WireSpan {
  text: string;
  style: "plain" | "bold" | "em";
}

export type WireBlock =
  | { kind: "paragraph"; spans: WireSpan[] }
  | { kind: "unordered_list" | "ordered_list"; items: WireSpan[][] };

export interface WireView {
  view_id: string;
  paragraph_index: number;
  range: WireRange;
  prompt_id: string;
  status: string;
  display_blocks: WireBlock[];
  stale: boolean;
}

export interface WirePrompt {
  id: string;
  label: string;
  category: "summary" | "inquisitive" | "advisory" | "custom";
  body: string;
  is_builtin: boolean;
}

export interface SessionInfo {
  session_id: string;
  document: { id: string; version: number; paragraphs: WireParagraph[] };
  onboarding: boolean;
}

export interface DocumentUpdate {
  version: number;
  changed: number[];
  deleted: number[];
  paragraphs: WireParagraph[];
}

export interface ScopeEvent {
  paragraph_index: number;
  neighborhood: number[];
  range: WireRange;
}

export type CursorEvent =
  | { kind: "scope"; data: ScopeEvent }
  | { kind: "view_pending"; data: { view_id: string; paragraph_index: number; prompt_id: string } }
  | { kind: "view_delta"; data: { view_id: string; display_text: string } }
  | { kind: "view_done"; data: WireView }
  | { kind: "view_error"; data: { view_id: string; detail: string } }
  | { kind: "error"; data: { detail: string } };

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`service returned ${status}`);
  }
}

async function jsonOrThrow<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail: unknown = null;
    try {
      detail = (await resp.json()).detail;
    } catch {
      // non-JSON error body; status alone will have to do
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

/**
 * Split an SSE byte stream into (event, data) pairs. Frames are separated by
 * a blank line; multi-line data fields are joined per the SSE rules.
 * Aborting `signal` stops the reader even between frames.
 */
export async function* readSseStream(
  body: ReadableStream<Uint8Array>,
  signal?: AbortSignal,
): AsyncGenerator<{ event: string; data: string }> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  const aborted =
    signal &&
    new Promise<never>((_, reject) => {
      const fail = () =>
        reject(new DOMException("The operation was aborted.", "AbortError"));
      if (signal.aborted) fail();
      else signal.addEventListener("abort", fail, { once: true });
    });
  // Keep the rejection handled even when nothing is racing against it.
  aborted?.catch(() => {});
  try {
    while (true) {
      const { value, done } = aborted
        ? await Promise.race([reader.read(), aborted])
        : await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let cut: number;
      while ((cut = buffer.indexOf("\n\n")) !== -1) {
        const frame = buffer.slice(0, cut);
        buffer = buffer.slice(cut + 2);
        const parsed = parseFrame(frame);
        if (parsed) yield parsed;
      }
    }
    const tail = parseFrame(buffer + decoder.decode());
    if (tail) yield tail;
  } finally {
    try {
      await reader.cancel();
    } catch {
      // stream may already be closed or errored
    }
  }
}

function parseFrame(frame: string): { event: string; data: string } | null {
  let event = "message";
  const data: string[] = [];
  for (const line of frame.split("\n")) {
    if (line.startsWith("event:")) {
      event = line.slice(6).trimStart();
    } else if (line.startsWith("data:")) {
      data.push(line.slice(5).trimStart());
    }
  }
  if (data.length === 0) return null;
  return { event, data: data.join("\n") };
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(this.url(path), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return jsonOrThrow<T>(resp);
  }

  async createSession(text: string): Promise<SessionInfo> {
    return this.post("/sessions", { text });
  }

  async updateDocument(
    sessionId: string,
    text: string,
    baseVersion: number,
  ): Promise<DocumentUpdate> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/document`), {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text, base_version: baseVersion }),
    });
    return jsonOrThrow<DocumentUpdate>(resp);
  }

  async getViews(sessionId: string): Promise<{ document_version: number; views: WireView[] }> {
    return jsonOrThrow(await fetch(this.url(`/sessions/${sessionId}/views`)));
  }

  async listPrompts(sessionId: string): Promise<WirePrompt[]> {
    const data = await jsonOrThrow<{ prompts: WirePrompt[] }>(
      await fetch(this.url(`/sessions/${sessionId}/prompts`)),
    );
    return data.prompts;
  }

  async addPrompt(
    sessionId: string,
    label: string,
    body: string,
    category = "custom",
  ): Promise<WirePrompt> {
    return this.post(`/sessions/${sessionId}/prompts`, { label, body, category });
  }

  /** Edit a prompt body. Editing a builtin returns a forked custom prompt. */
  async editPrompt(
    sessionId: string,
    promptId: string,
    body: string,
    label?: string,
  ): Promise<WirePrompt> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/prompts/${promptId}`), {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(label === undefined ? { body } : { body, label }),
    });
    return jsonOrThrow<WirePrompt>(resp);
  }

  /**
   * Place the cursor and consume the event stream it opens. Offsets are in
   * code points. Abort `signal` to close the subscription.
   */
  async *cursorStream(
    sessionId: string,
    offset: number,
    promptId: string,
    signal?: AbortSignal,
  ): AsyncGenerator<CursorEvent> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/cursor`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ offset, prompt_id: promptId }),
      signal,
    });
    if (!resp.ok || !resp.body) {
      let detail: unknown = null;
      try {
        detail = (await resp.json()).detail;
      } catch {
        // leave detail null
      }
      throw new ApiError(resp.status, detail);
    }
    for await (const frame of readSseStream(resp.body, signal)) {
      yield { kind: frame.event, data: JSON.parse(frame.data) } as CursorEvent;
    }
  }
}
