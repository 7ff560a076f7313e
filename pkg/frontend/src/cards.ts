// Sidebar of view cards. Cards are grouped by paragraph, in paragraph
// order, and exactly one neighborhood is shown at a time: a new scope wipes
// the previous cards. Cards are read-only; nothing here can write into the
// editor pane.

import type { ScopeEvent, WireBlock, WireView } from "./api.js";

type CardStatus = "pending" | "streaming" | "complete" | "error";

export interface CardState {
  viewId: string;
  paragraphIndex: number;
  promptId: string;
  status: CardStatus;
  streamText: string;
  view: WireView | null;
  errorDetail: string | null;
  stale: boolean;
  collapsed: boolean;
}

export function renderBlocks(blocks: WireBlock[]): DocumentFragment {
  const frag = document.createDocumentFragment();
  for (const block of blocks) {
    if (block.kind === "paragraph") {
      const p = document.createElement("p");
      p.append(...block.spans.map(renderSpan));
      frag.append(p);
    } else {
      const list = document.createElement(block.kind === "ordered_list" ? "ol" : "ul");
      for (const item of block.items) {
        const li = document.createElement("li");
        li.append(...item.map(renderSpan));
        list.append(li);
      }
      frag.append(list);
    }
  }
  return frag;
}

function renderSpan(span: { text: string; style: string }): Node {
  if (span.style === "bold") {
    const el = document.createElement("strong");
    el.textContent = span.text;
    return el;
  }
  if (span.style === "em") {
    const el = document.createElement("em");
    el.textContent = span.text;
    return el;
  }
  return document.createTextNode(span.text);
}

export class CardList {
  readonly container: HTMLElement;

  private order: number[] = [];
  private currentIndex: number | null = null;
  private cards = new Map<string, CardState>();
  private hoverListeners: Array<(paragraphIndex: number | null) => void> = [];
  private labelFor: (promptId: string) => string;

  constructor(container: HTMLElement, labelFor: (promptId: string) => string) {
    this.container = container;
    this.container.classList.add("card-list");
    this.labelFor = labelFor;
  }

  onHover(cb: (paragraphIndex: number | null) => void): void {
    this.hoverListeners.push(cb);
  }

  /** Start rendering a new neighborhood, discarding the previous one. */
  beginNeighborhood(scope: ScopeEvent): void {
    this.order = [...scope.neighborhood].sort((a, b) => a - b);
    this.currentIndex = scope.paragraph_index;
    this.cards.clear();
    this.render();
  }

  pending(data: { view_id: string; paragraph_index: number; prompt_id: string }): void {
    this.cards.set(data.view_id, {
      viewId: data.view_id,
      paragraphIndex: data.paragraph_index,
      promptId: data.prompt_id,
      status: "pending",
      streamText: "",
      view: null,
      errorDetail: null,
      stale: false,
      collapsed: false,
    });
    this.render();
  }

  delta(data: { view_id: string; display_text: string }): void {
    const card = this.cards.get(data.view_id);
    if (!card) return;
    card.status = "streaming";
    card.streamText = data.display_text;
    this.render();
  }

  done(view: WireView): void {
    const card = this.cards.get(view.view_id);
    if (!card) return;
    card.status = "complete";
    card.view = view;
    card.stale = view.stale;
    this.render();
  }

  error(data: { view_id: string; detail: string }): void {
    const card = this.cards.get(data.view_id);
    if (!card) return;
    card.status = "error";
    card.errorDetail = data.detail;
    this.render();
  }

  /**
   * Align with a snapshot: refresh stale flags and drop settled cards the
   * snapshot no longer vouches for, so no orphans survive invalidation.
   */
  reconcile(views: WireView[]): void {
    const byKey = new Map(views.map((v) => [`${v.paragraph_index}:${v.prompt_id}`, v]));
    for (const [id, card] of [...this.cards]) {
      if (card.status === "pending" || card.status === "streaming") continue;
      const match = byKey.get(`${card.paragraphIndex}:${card.promptId}`);
      if (!match) {
        this.cards.delete(id);
      } else {
        card.status = match.status === "error" ? "error" : "complete";
        card.view = match;
        card.stale = match.stale;
        if (card.status !== "error") card.errorDetail = null;
      }
    }
    this.render();
  }

  /** Mark completed views on these paragraphs stale (local echo of an edit). */
  markStale(paragraphIndexes: number[]): void {
    const marked = new Set(paragraphIndexes);
    for (const card of this.cards.values()) {
      if (marked.has(card.paragraphIndex)) card.stale = true;
    }
    this.render();
  }

  /** Visually raise the cards of a hovered paragraph. */
  raise(paragraphIndex: number | null): void {
    for (const group of this.container.querySelectorAll<HTMLElement>(".card-group")) {
      group.classList.toggle("raised", Number(group.dataset.paragraph) === paragraphIndex);
    }
  }

  cardStates(): CardState[] {
    return [...this.cards.values()];
  }

  private notifyHover(index: number | null): void {
    for (const cb of this.hoverListeners) cb(index);
  }

  private render(): void {
    this.container.textContent = "";
    for (const index of this.order) {
      const group = document.createElement("section");
      group.className = "card-group";
      group.dataset.paragraph = String(index);
      if (index === this.currentIndex) group.classList.add("current");

      const heading = document.createElement("h2");
      heading.className = "card-group-title";
      heading.textContent = `Paragraph ${index + 1}`;
      group.append(heading);

      for (const card of this.cards.values()) {
        if (card.paragraphIndex === index) group.append(this.renderCard(card));
      }
      this.container.append(group);
    }
    const current = this.container.querySelector<HTMLElement>(".card-group.current");
    try {
      current?.scrollIntoView?.({ block: "center" });
    } catch {
      // no layout engine under test
    }
  }

  private renderCard(card: CardState): HTMLElement {
    const el = document.createElement("article");
    el.className = `card ${card.status}`;
    el.dataset.viewId = card.viewId;
    el.dataset.paragraph = String(card.paragraphIndex);
    el.dataset.prompt = card.promptId;
    if (card.collapsed) el.classList.add("collapsed");

    const toggle = document.createElement("button");
    toggle.type = "button";
    toggle.className = "card-toggle";

    const label = document.createElement("span");
    label.className = "card-label";
    label.textContent = this.labelFor(card.promptId);
    toggle.append(label);

    const badge = document.createElement("span");
    badge.className = "stale-badge";
    badge.textContent = "stale";
    badge.hidden = !card.stale;
    toggle.append(badge);

    const status = document.createElement("span");
    status.className = "card-status";
    status.textContent =
      card.status === "pending" ? "waiting" : card.status === "streaming" ? "writing" : "";
    toggle.append(status);

    toggle.addEventListener("click", () => {
      card.collapsed = !card.collapsed;
      this.render();
    });
    el.append(toggle);

    const body = document.createElement("div");
    body.className = "card-body";
    if (card.status === "complete" && card.view) {
      body.append(renderBlocks(card.view.display_blocks));
    } else if (card.status === "error") {
      body.classList.add("card-error");
      body.textContent = card.errorDetail ?? "view failed";
    } else {
      body.classList.add("card-streaming");
      body.textContent = card.streamText;
    }
    body.hidden = card.collapsed;
    el.append(body);

    el.addEventListener("mouseenter", () => this.notifyHover(card.paragraphIndex));
    el.addEventListener("mouseleave", () => this.notifyHover(null));
    return el;
  }
}
