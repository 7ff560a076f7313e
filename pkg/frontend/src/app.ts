// Wires the editor, card list, and prompt controls to the view service.
// One session, one active event-stream subscription; cursor movement and
// typing are debounced so a burst of activity costs one request.

import {
  ApiClient,
  ApiError,
  type ScopeEvent,
  type WireParagraph,
  type WirePrompt,
  type WireRange,
} from "./api.js";
import { CardList } from "./cards.js";
import { Editor } from "./editor.js";
import { PromptPanel } from "./prompts.js";

export const DEFAULT_DEBOUNCE_MS = 300;

export interface AppOptions {
  baseUrl?: string;
  initialText?: string;
  debounceMs?: number;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    const detail = typeof err.detail === "string" ? err.detail : "";
    return detail || `service returned ${err.status}`;
  }
  return err instanceof Error ? err.message : String(err);
}

export class App {
  readonly api: ApiClient;
  readonly editor: Editor;
  readonly cards: CardList;
  readonly promptPanel: PromptPanel;
  readonly statusEl: HTMLElement;
  readonly onboardingEl: HTMLElement;

  sessionId = "";
  version = 0;
  paragraphs: WireParagraph[] = [];
  prompts: WirePrompt[] = [];
  activePromptId = "";
  lastOffset = 0;

  private readonly debounceMs: number;
  private readonly initialText: string;
  private cursorTimer: ReturnType<typeof setTimeout> | null = null;
  private editTimer: ReturnType<typeof setTimeout> | null = null;
  private streamAbort: AbortController | null = null;
  private busy = 0;

  constructor(root: HTMLElement, opts: AppOptions = {}) {
    this.api = new ApiClient(opts.baseUrl ?? "");
    this.debounceMs = opts.debounceMs ?? DEFAULT_DEBOUNCE_MS;
    this.initialText = opts.initialText ?? "";

    root.classList.add("app");
    const editorCol = document.createElement("div");
    editorCol.className = "editor-col";
    const sidebar = document.createElement("aside");
    sidebar.className = "sidebar";
    root.append(editorCol, sidebar);

    this.editor = new Editor(editorCol);

    const promptHost = document.createElement("div");
    const cardsHost = document.createElement("div");
    this.onboardingEl = document.createElement("p");
    this.onboardingEl.className = "onboarding-hint";
    this.onboardingEl.textContent =
      "Write a paragraph and views about it will appear here.";
    this.onboardingEl.hidden = true;
    this.statusEl = document.createElement("p");
    this.statusEl.className = "status-line";
    this.statusEl.hidden = true;
    sidebar.append(promptHost, this.onboardingEl, cardsHost, this.statusEl);

    this.promptPanel = new PromptPanel(promptHost);
    this.cards = new CardList(cardsHost, (id) => this.promptLabel(id));

    this.editor.onCursor((offset) => this.placeCursor(offset));
    this.editor.onEdit(() => this.scheduleEdit());
    this.editor.onParagraphHover((index) => this.cards.raise(index));
    this.cards.onHover((index) => {
      this.editor.setHover(index === null ? null : this.rangeOf(index));
    });
    this.promptPanel.onSelect((promptId) => {
      this.activePromptId = promptId;
      if (this.paragraphs.length) void this.runCursor(this.lastOffset);
    });
    this.promptPanel.onSave((promptId, body, label) => {
      void this.savePrompt(promptId, body, label);
    });
  }

  async start(): Promise<void> {
    this.editor.value = this.initialText;
    const info = await this.api.createSession(this.initialText);
    this.sessionId = info.session_id;
    this.version = info.document.version;
    this.paragraphs = info.document.paragraphs;
    this.editor.setParagraphs(this.paragraphs);

    this.prompts = await this.api.listPrompts(this.sessionId);
    this.activePromptId = this.prompts[0]?.id ?? "";
    this.promptPanel.setPrompts(this.prompts, this.activePromptId);

    this.onboardingEl.hidden = !info.onboarding;
    if (!info.onboarding) {
      // First useful view without any cursor movement: scope the opening
      // paragraph right away.
      await this.runCursor(0);
    }
  }

  /** Resolve once no request, stream, or debounce timer is outstanding. */
  async settle(): Promise<void> {
    for (let i = 0; i < 2000; i++) {
      if (this.busy === 0 && this.cursorTimer === null && this.editTimer === null) {
        await sleep(0);
        if (this.busy === 0 && this.cursorTimer === null && this.editTimer === null) return;
      }
      await sleep(5);
    }
    throw new Error("app did not settle");
  }

  dispose(): void {
    if (this.cursorTimer !== null) clearTimeout(this.cursorTimer);
    if (this.editTimer !== null) clearTimeout(this.editTimer);
    this.cursorTimer = null;
    this.editTimer = null;
    this.streamAbort?.abort();
  }

  placeCursor(offset: number): void {
    this.lastOffset = offset;
    if (this.cursorTimer !== null) clearTimeout(this.cursorTimer);
    this.cursorTimer = setTimeout(() => {
      this.cursorTimer = null;
      void this.runCursor(offset);
    }, this.debounceMs);
  }

  private scheduleEdit(): void {
    if (this.editTimer !== null) clearTimeout(this.editTimer);
    this.editTimer = setTimeout(() => {
      this.editTimer = null;
      void this.pushDocument(this.editor.value);
    }, this.debounceMs);
  }

  private promptLabel(promptId: string): string {
    return this.prompts.find((p) => p.id === promptId)?.label ?? promptId;
  }

  private rangeOf(index: number): WireRange | null {
    return this.paragraphs.find((p) => p.index === index)?.range ?? null;
  }

  private applyScope(scope: ScopeEvent): void {
    this.editor.setScope(scope.range);
    this.cards.beginNeighborhood(scope);
  }

  private async runCursor(offset: number): Promise<void> {
    this.lastOffset = offset;
    this.streamAbort?.abort();
    const abort = new AbortController();
    this.streamAbort = abort;
    this.busy += 1;
    try {
      const stream = this.api.cursorStream(
        this.sessionId,
        offset,
        this.activePromptId,
        abort.signal,
      );
      for await (const event of stream) {
        if (abort.signal.aborted) break;
        switch (event.kind) {
          case "scope":
            this.applyScope(event.data);
            break;
          case "view_pending":
            this.cards.pending(event.data);
            break;
          case "view_delta":
            this.cards.delta(event.data);
            break;
          case "view_done":
            this.cards.done(event.data);
            break;
          case "view_error":
            this.cards.error(event.data);
            break;
          case "error":
            this.setStatus(event.data.detail);
            break;
        }
      }
      if (!abort.signal.aborted) {
        // However the stream wound down, converge on the snapshot.
        const snap = await this.api.getViews(this.sessionId);
        this.cards.reconcile(snap.views);
      }
    } catch (err) {
      if (!isAbort(err)) this.setStatus(describeError(err));
    } finally {
      if (this.streamAbort === abort) this.streamAbort = null;
      this.busy -= 1;
    }
  }

  private async pushDocument(text: string): Promise<void> {
    this.busy += 1;
    try {
      let update;
      try {
        update = await this.api.updateDocument(this.sessionId, text, this.version);
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          const detail = err.detail as { current_version?: number } | null;
          const current = detail?.current_version ?? this.version;
          update = await this.api.updateDocument(this.sessionId, text, current);
        } else {
          throw err;
        }
      }
      this.version = update.version;
      this.paragraphs = update.paragraphs;
      this.editor.setParagraphs(this.paragraphs);
      this.onboardingEl.hidden = this.paragraphs.length > 0;
      this.setStatus("");
      // Surviving views pick up their stale badges, then the caret's
      // neighborhood regenerates.
      const snap = await this.api.getViews(this.sessionId);
      this.cards.reconcile(snap.views);
      if (this.paragraphs.length) this.placeCursor(this.editor.cursorOffset);
    } catch (err) {
      this.setStatus(describeError(err));
    } finally {
      this.busy -= 1;
    }
  }

  private async savePrompt(promptId: string, body: string, label: string): Promise<void> {
    this.busy += 1;
    try {
      // An untouched label field means "no label change": the service then
      // names a forked builtin itself.
      const original = this.prompts.find((p) => p.id === promptId);
      const labelArg = original && label === original.label ? undefined : label;
      const saved = await this.api.editPrompt(this.sessionId, promptId, body, labelArg);
      this.prompts = await this.api.listPrompts(this.sessionId);
      this.activePromptId = saved.id;
      this.promptPanel.setPrompts(this.prompts, saved.id);
      this.setStatus("");
      if (this.paragraphs.length) void this.runCursor(this.lastOffset);
    } catch (err) {
      this.setStatus(describeError(err));
    } finally {
      this.busy -= 1;
    }
  }

  private setStatus(text: string): void {
    this.statusEl.textContent = text;
    this.statusEl.hidden = !text;
  }
}

export async function bootApp(root: HTMLElement, opts: AppOptions = {}): Promise<App> {
  const app = new App(root, opts);
  await app.start();
  return app;
}
