// Single-page review app: load the oldest pending task, edit span
// metadata locally, submit with optimistic concurrency, finalize and
// advance. Talks only to the documented JSON API.

import { ApiClient, ApiError, ConflictError } from "./api.js";
import {
  InvalidEdit,
  deleteSpan,
  mergeWithNext,
  relabelSpan,
  spansEqual,
  splitSpan,
} from "./state.js";
import { renderPalette, renderTask } from "./render.js";
import type { LabelInfo, SaliencyPayload, SpanTriple, TaskView } from "./types.js";

export interface AppOptions {
  reviewer?: string;
}

export class ReviewApp {
  labels: LabelInfo[] = [];
  task: TaskView | null = null;
  buffer: SpanTriple[] = [];
  selected: number | null = null;
  caret: number | null = null;
  heatmaps = new Map<number, SaliencyPayload>();
  saliencyAvailable = true;
  private readonly reviewer: string;

  constructor(
    private readonly doc: Document,
    private readonly api: ApiClient,
    options: AppOptions = {},
  ) {
    this.reviewer = options.reviewer ?? "reviewer";
  }

  private el<T extends HTMLElement>(id: string): T {
    const node = this.doc.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  }

  // -- banners / status --

  banner(kind: "info" | "warn" | "error", message: string, retry?: () => void): void {
    const banner = this.el<HTMLElement>("banner");
    banner.hidden = false;
    banner.className = `banner banner-${kind}`;
    banner.textContent = message;
    if (retry) {
      const button = this.doc.createElement("button");
      button.type = "button";
      button.id = "btn-retry";
      button.textContent = "retry";
      button.addEventListener("click", () => {
        this.clearBanner();
        retry();
      });
      banner.appendChild(button);
    }
  }

  clearBanner(): void {
    const banner = this.el<HTMLElement>("banner");
    banner.hidden = true;
    banner.textContent = "";
  }

  get dirty(): boolean {
    return this.task !== null && !spansEqual(this.buffer, this.task.label);
  }

  // -- lifecycle --

  async boot(): Promise<void> {
    try {
      this.labels = await this.api.labels();
    } catch {
      this.banner("error", "cannot reach the review service", () => void this.boot());
      return;
    }
    renderPalette(this.el("label-palette"), this.labels,
      (code) => this.relabelSelected(code));
    this.bindControls();
    await this.loadNextTask();
  }

  async loadNextTask(): Promise<void> {
    try {
      const task = await this.api.nextTask(this.reviewer);
      this.setTask(task);
    } catch {
      this.banner("error", "network failure while loading the next task",
        () => void this.loadNextTask());
    }
  }

  private setTask(task: TaskView | null): void {
    this.task = task;
    this.buffer = task ? task.label.map((s): SpanTriple => [...s]) : [];
    this.selected = null;
    this.caret = null;
    this.heatmaps.clear();
    this.render();
  }

  async reloadTask(): Promise<void> {
    if (!this.task) return;
    try {
      this.setTask(await this.api.getAbstract(this.task.abstract_id));
    } catch {
      this.banner("error", "network failure while reloading",
        () => void this.reloadTask());
    }
  }

  // -- edits (buffer only; nothing leaves until submit) --

  selectSpan(index: number): void {
    this.selected = index;
    this.render();
  }

  setCaret(offset: number): void {
    this.caret = offset;
    const input = this.el<HTMLInputElement>("split-offset");
    input.value = String(offset);
  }

  relabelSelected(code: string): void {
    if (this.selected === null) {
      this.banner("warn", "select a span first");
      return;
    }
    try {
      this.buffer = relabelSpan(this.buffer, this.selected, code);
      this.selected = this.buffer.findIndex((s) => s[2] === code);
      this.clearBanner();
    } catch (error) {
      if (error instanceof InvalidEdit) this.banner("warn", error.message);
    }
    this.render();
  }

  splitSelected(boundary: number, leftLabel: string, rightLabel: string): void {
    if (this.selected === null || !this.task) {
      this.banner("warn", "select a span first");
      return;
    }
    try {
      this.buffer = splitSpan(this.buffer, this.selected, boundary,
        leftLabel, rightLabel, this.task.data);
      this.selected = null;
      this.clearBanner();
      this.render();
    } catch (error) {
      if (error instanceof InvalidEdit) {
        this.banner("warn", error.message); // inline validation, no request
      }
    }
  }

  mergeSelectedWithNext(): void {
    if (this.selected === null) return;
    try {
      this.buffer = mergeWithNext(this.buffer, this.selected);
      this.selected = null;
      this.render();
    } catch (error) {
      if (error instanceof InvalidEdit) this.banner("warn", error.message);
    }
  }

  deleteSelected(): void {
    if (this.selected === null) return;
    this.buffer = deleteSpan(this.buffer, this.selected);
    this.selected = null;
    this.render();
  }

  // -- server round-trips --

  async submit(): Promise<void> {
    if (!this.task) return;
    if (!this.dirty) {
      this.banner("info", "no changes to submit");
      return;
    }
    try {
      await this.api.submitAnnotation(this.task.abstract_id, this.buffer,
        this.task.version, this.reviewer);
      this.clearBanner();
      await this.reloadTask();
    } catch (error) {
      if (error instanceof ConflictError) {
        this.banner("warn",
          "someone else changed this task (stale version); reloaded the latest");
        await this.reloadTask();
      } else if (error instanceof ApiError) {
        this.banner("error", `rejected: ${error.message}`);
      } else {
        this.banner("error", "network failure while submitting; edits kept",
          () => void this.submit());
      }
    }
  }

  async finalizeAndAdvance(): Promise<void> {
    if (!this.task) return;
    if (this.dirty) {
      await this.submit();
      if (this.dirty) return; // submit failed; keep the task open
    }
    try {
      await this.api.finalize(this.task.abstract_id);
    } catch {
      this.banner("error", "finalize failed; task kept open");
      return;
    }
    await this.loadNextTask();
  }

  async toggleHeatmap(): Promise<void> {
    if (!this.task || this.selected === null) return;
    const span = this.buffer[this.selected];
    const sentIndex = this.task.sentences.findIndex(
      ([s, e]) => span[0] < e && s < span[1]);
    if (sentIndex < 0) return;
    if (this.heatmaps.has(sentIndex)) {
      this.heatmaps.delete(sentIndex);
      this.render();
      return;
    }
    try {
      const payload = await this.api.saliency(this.task.abstract_id, sentIndex);
      this.heatmaps.set(sentIndex, payload);
    } catch {
      this.saliencyAvailable = false; // hide the feature, review unaffected
    }
    this.render();
  }

  // -- rendering & controls --

  render(): void {
    const meta = this.el<HTMLElement>("task-meta");
    const queue = this.el<HTMLElement>("queue-state");
    const view = this.el<HTMLElement>("abstract-view");
    const heatButton = this.el<HTMLButtonElement>("btn-heatmap");
    heatButton.hidden = !this.saliencyAvailable;

    if (!this.task) {
      meta.textContent = "";
      view.textContent = "";
      queue.textContent = "no tasks pending - the queue is empty";
      queue.className = "queue-empty";
      return;
    }
    queue.textContent = "";
    queue.className = "";
    meta.textContent =
      `abstract ${this.task.abstract_id} - version ${this.task.version}` +
      `${this.dirty ? " - unsaved edits" : ""}`;

    const provenance = new Map<string, string>();
    this.task.label.forEach((span, i) => {
      provenance.set(`${span[0]}:${span[1]}:${span[2]}`,
        this.task!.provenance[i] ?? "auto");
    });
    renderTask(view, this.task, this.buffer, provenance, this.labels,
      this.selected, this.heatmaps, {
        onSelectSpan: (index) => this.selectSpan(index),
        onCaret: (offset) => this.setCaret(offset),
      });
  }

  private bindControls(): void {
    this.el("btn-submit").addEventListener("click", () => void this.submit());
    this.el("btn-finalize").addEventListener("click",
      () => void this.finalizeAndAdvance());
    this.el("btn-delete").addEventListener("click", () => this.deleteSelected());
    this.el("btn-merge").addEventListener("click",
      () => this.mergeSelectedWithNext());
    this.el("btn-heatmap").addEventListener("click",
      () => void this.toggleHeatmap());
    this.el("btn-split").addEventListener("click", () => {
      const offset = Number(this.el<HTMLInputElement>("split-offset").value);
      const left = this.el<HTMLSelectElement>("split-left").value;
      const right = this.el<HTMLSelectElement>("split-right").value;
      this.splitSelected(offset, left, right);
    });
    const left = this.el<HTMLSelectElement>("split-left");
    const right = this.el<HTMLSelectElement>("split-right");
    for (const select of [left, right]) {
      select.textContent = "";
      for (const label of this.labels) {
        const option = this.doc.createElement("option");
        option.value = label.code;
        option.textContent = label.code;
        select.appendChild(option);
      }
    }
    this.doc.addEventListener("keydown", (event) => {
      const target = event.target as HTMLElement | null;
      if (target && ["INPUT", "SELECT", "TEXTAREA"].includes(target.tagName)) return;
      const key = (event as KeyboardEvent).key;
      if (key >= "1" && key <= "8") {
        const label = this.labels[Number(key) - 1];
        if (label) this.relabelSelected(label.code);
      } else if (key === "f") {
        void this.finalizeAndAdvance();
      } else if (key === "h") {
        void this.toggleHeatmap();
      }
    });
  }
}

export function initApp(
  doc: Document, api: ApiClient, options: AppOptions = {},
): ReviewApp {
  return new ReviewApp(doc, api, options);
}
