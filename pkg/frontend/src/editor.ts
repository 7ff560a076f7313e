// Plain-textarea editor with a mirrored backdrop. The textarea owns the
// text; the backdrop renders the same string behind it (same metrics, same
// wrapping) so paragraph ranges can be marked without rich-text machinery.
// Generated text never enters this pane; the only writer here is the user.

import type { WireParagraph, WireRange } from "./api.js";
import { sliceCodePoints, toCodePoints } from "./offsets.js";

export const SCOPE_CAPTION = "Views are generated from this paragraph";

export class Editor {
  readonly pane: HTMLElement;
  readonly textarea: HTMLTextAreaElement;
  readonly backdrop: HTMLElement;
  readonly caption: HTMLElement;

  private paragraphs: WireParagraph[] = [];
  private scope: WireRange | null = null;
  private hover: WireRange | null = null;
  private hoveredParagraph: number | null = null;

  private cursorListeners: Array<(offset: number) => void> = [];
  private editListeners: Array<(text: string) => void> = [];
  private paragraphHoverListeners: Array<(index: number | null) => void> = [];

  constructor(container: HTMLElement) {
    this.pane = document.createElement("div");
    this.pane.className = "editor-pane";

    const surface = document.createElement("div");
    surface.className = "editor-surface";

    this.backdrop = document.createElement("div");
    this.backdrop.className = "editor-backdrop";
    this.backdrop.setAttribute("aria-hidden", "true");

    this.textarea = document.createElement("textarea");
    this.textarea.className = "editor-input";
    this.textarea.spellcheck = false;

    surface.append(this.backdrop, this.textarea);

    this.caption = document.createElement("div");
    this.caption.className = "scope-caption";
    this.caption.textContent = SCOPE_CAPTION;
    this.caption.hidden = true;

    this.pane.append(surface, this.caption);
    container.append(this.pane);

    this.textarea.addEventListener("input", () => {
      // Ranges are stale until the server re-segments; show bare text.
      this.paragraphs = [];
      this.scope = null;
      this.hover = null;
      this.renderBackdrop();
      for (const cb of this.editListeners) cb(this.textarea.value);
    });
    for (const type of ["click", "keyup", "select"] as const) {
      this.textarea.addEventListener(type, () => this.reportCursor());
    }
    this.textarea.addEventListener("scroll", () => {
      this.backdrop.scrollTop = this.textarea.scrollTop;
      this.backdrop.scrollLeft = this.textarea.scrollLeft;
    });
    this.textarea.addEventListener("mousemove", (e) => this.hitTestParagraph(e));
    this.textarea.addEventListener("mouseleave", () => this.notifyParagraphHover(null));
  }

  get value(): string {
    return this.textarea.value;
  }

  set value(text: string) {
    this.textarea.value = text;
    this.renderBackdrop();
  }

  /** Caret position in code points. */
  get cursorOffset(): number {
    return toCodePoints(this.textarea.value, this.textarea.selectionStart);
  }

  onCursor(cb: (offset: number) => void): void {
    this.cursorListeners.push(cb);
  }

  onEdit(cb: (text: string) => void): void {
    this.editListeners.push(cb);
  }

  onParagraphHover(cb: (index: number | null) => void): void {
    this.paragraphHoverListeners.push(cb);
  }

  setParagraphs(paragraphs: WireParagraph[]): void {
    this.paragraphs = paragraphs;
    this.renderBackdrop();
  }

  /** Mark the paragraph whose text is being sent to the model. */
  setScope(range: WireRange | null): void {
    this.scope = range;
    this.caption.hidden = range === null;
    this.renderBackdrop();
  }

  /** Outline a paragraph range while its card is hovered. */
  setHover(range: WireRange | null): void {
    this.hover = range;
    this.renderBackdrop();
  }

  private reportCursor(): void {
    const offset = this.cursorOffset;
    for (const cb of this.cursorListeners) cb(offset);
  }

  private notifyParagraphHover(index: number | null): void {
    if (index === this.hoveredParagraph) return;
    this.hoveredParagraph = index;
    for (const cb of this.paragraphHoverListeners) cb(index);
  }

  // The textarea sits over the backdrop, so paragraph hover is resolved by
  // hit-testing the mirrored spans' boxes.
  private hitTestParagraph(e: MouseEvent): void {
    let hit: number | null = null;
    for (const span of this.backdrop.querySelectorAll<HTMLElement>(".para")) {
      const box = span.getBoundingClientRect();
      if (box.height === 0) continue;
      if (e.clientY >= box.top && e.clientY <= box.bottom) {
        hit = Number(span.dataset.index);
        break;
      }
    }
    this.notifyParagraphHover(hit);
  }

  private matches(range: WireRange | null, p: WireParagraph): boolean {
    return range !== null && range.start === p.range.start && range.end === p.range.end;
  }

  private renderBackdrop(): void {
    const text = this.textarea.value;
    this.backdrop.textContent = "";
    let cursor = 0;
    for (const p of this.paragraphs) {
      if (p.range.start > cursor) {
        this.backdrop.append(sliceCodePoints(text, cursor, p.range.start));
      }
      const span = document.createElement("span");
      span.className = "para";
      span.dataset.index = String(p.index);
      if (this.matches(this.scope, p)) span.classList.add("scope-ring");
      if (this.matches(this.hover, p)) span.classList.add("hover-ring");
      span.textContent = sliceCodePoints(text, p.range.start, p.range.end);
      this.backdrop.append(span);
      cursor = p.range.end;
    }
    this.backdrop.append(sliceCodePoints(text, cursor, Number.MAX_SAFE_INTEGER));
    // Trailing sentinel keeps the mirror as tall as the textarea's last line.
    this.backdrop.append("\n");
  }
}
