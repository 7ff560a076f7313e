// Prompt controls: grouped buttons for picking the active prompt, plus an
// editor panel that shows the selected prompt's body text exactly as the
// service stores it. Saving an edited builtin forks a custom copy; the
// builtin button stays put.

import type { WirePrompt } from "./api.js";

const GROUPS: Array<{ category: WirePrompt["category"]; title: string }> = [
  { category: "summary", title: "Summary" },
  { category: "inquisitive", title: "Inquisitive" },
  { category: "advisory", title: "Advisory" },
  { category: "custom", title: "Custom" },
];

export class PromptPanel {
  readonly container: HTMLElement;
  readonly groupsEl: HTMLElement;
  readonly labelInput: HTMLInputElement;
  readonly bodyArea: HTMLTextAreaElement;
  readonly saveButton: HTMLButtonElement;

  private prompts: WirePrompt[] = [];
  private activeId: string | null = null;
  private selectListeners: Array<(promptId: string) => void> = [];
  private saveListeners: Array<(promptId: string, body: string, label: string) => void> = [];

  constructor(container: HTMLElement) {
    this.container = container;
    this.container.classList.add("prompt-panel");

    this.groupsEl = document.createElement("div");
    this.groupsEl.className = "prompt-groups";
    this.container.append(this.groupsEl);

    const editor = document.createElement("div");
    editor.className = "prompt-editor";

    const heading = document.createElement("h2");
    heading.className = "prompt-editor-title";
    heading.textContent = "Prompt text";
    editor.append(heading);

    const labelField = document.createElement("label");
    labelField.className = "prompt-field";
    labelField.append("Label ");
    this.labelInput = document.createElement("input");
    this.labelInput.className = "prompt-label";
    this.labelInput.type = "text";
    labelField.append(this.labelInput);
    editor.append(labelField);

    this.bodyArea = document.createElement("textarea");
    this.bodyArea.className = "prompt-body";
    this.bodyArea.rows = 6;
    editor.append(this.bodyArea);

    this.saveButton = document.createElement("button");
    this.saveButton.type = "button";
    this.saveButton.className = "prompt-save";
    this.saveButton.textContent = "Save prompt";
    this.saveButton.addEventListener("click", () => {
      if (this.activeId === null) return;
      for (const cb of this.saveListeners) {
        cb(this.activeId, this.bodyArea.value, this.labelInput.value);
      }
    });
    editor.append(this.saveButton);

    this.container.append(editor);
  }

  onSelect(cb: (promptId: string) => void): void {
    this.selectListeners.push(cb);
  }

  onSave(cb: (promptId: string, body: string, label: string) => void): void {
    this.saveListeners.push(cb);
  }

  get active(): string | null {
    return this.activeId;
  }

  setPrompts(prompts: WirePrompt[], activeId: string): void {
    this.prompts = prompts;
    this.activeId = activeId;
    this.groupsEl.textContent = "";
    for (const { category, title } of GROUPS) {
      const group = document.createElement("div");
      group.className = "prompt-group";
      group.dataset.category = category;

      const label = document.createElement("h3");
      label.className = "prompt-group-title";
      label.textContent = title;
      group.append(label);

      for (const prompt of prompts.filter((p) => p.category === category)) {
        const button = document.createElement("button");
        button.type = "button";
        button.className = "prompt-btn";
        button.dataset.promptId = prompt.id;
        button.textContent = prompt.label;
        if (prompt.id === activeId) button.classList.add("active");
        button.addEventListener("click", () => this.select(prompt.id));
        group.append(button);
      }
      this.groupsEl.append(group);
    }
    this.fillEditor();
  }

  select(promptId: string): void {
    if (!this.prompts.some((p) => p.id === promptId)) return;
    this.activeId = promptId;
    for (const button of this.groupsEl.querySelectorAll<HTMLElement>(".prompt-btn")) {
      button.classList.toggle("active", button.dataset.promptId === promptId);
    }
    this.fillEditor();
    for (const cb of this.selectListeners) cb(promptId);
  }

  // The body is shown verbatim: what the service sends is what the writer
  // sees, builtins included.
  private fillEditor(): void {
    const prompt = this.prompts.find((p) => p.id === this.activeId);
    this.labelInput.value = prompt ? prompt.label : "";
    this.bodyArea.value = prompt ? prompt.body : "";
  }
}
