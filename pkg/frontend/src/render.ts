// DOM rendering: the abstract as sentences, spans as colored underlined
// regions with label chips and provenance badges, optional word-level
// saliency heatmap. Rendered regions carry their exact server offsets
// in data attributes; the text content is never altered.

import type { LabelInfo, SaliencyPayload, SpanTriple, TaskView } from "./types.js";

export interface RenderHandlers {
  onSelectSpan(index: number): void;
  onCaret(offset: number): void;
}

export function colorOf(labels: LabelInfo[], code: string): string {
  const hit = labels.find((l) => l.code === code);
  return hit ? hit.color : "#888888";
}

interface Region {
  start: number;
  end: number;
  spanIndexes: number[]; // co-extensive multi-label spans share a region
}

function regionsForSentence(
  spans: SpanTriple[], sentStart: number, sentEnd: number,
): Region[] {
  const regions: Region[] = [];
  spans.forEach((span, index) => {
    const start = Math.max(span[0], sentStart);
    const end = Math.min(span[1], sentEnd);
    if (start >= end) return;
    const shared = regions.find((r) => r.start === start && r.end === end);
    if (shared) {
      shared.spanIndexes.push(index);
    } else {
      regions.push({ start, end, spanIndexes: [index] });
    }
  });
  return regions.sort((a, b) => a.start - b.start);
}

function heatColor(value: number): string {
  // positive saliency: warm tint, negative: cool; alpha from magnitude
  const alpha = Math.min(Math.abs(value), 1) * 0.85;
  return value >= 0
    ? `rgba(230, 120, 30, ${alpha.toFixed(3)})`
    : `rgba(60, 120, 230, ${alpha.toFixed(3)})`;
}

/** Wrap the words of `text` in tinted <mark> elements, matching the
 * payload's word sequence left to right. */
function applyHeatmap(text: string, payload: SaliencyPayload): DocumentFragment {
  const fragment = document.createDocumentFragment();
  let cursor = 0;
  payload.words.forEach((word, i) => {
    const at = text.indexOf(word, cursor);
    if (at < 0) return;
    if (at > cursor) {
      fragment.appendChild(document.createTextNode(text.slice(cursor, at)));
    }
    const mark = document.createElement("mark");
    mark.className = "heat-word";
    mark.textContent = word;
    mark.style.backgroundColor = heatColor(payload.values[i]);
    mark.title = `${word}: ${payload.values[i].toFixed(3)} (${payload.label})`;
    fragment.appendChild(mark);
    cursor = at + word.length;
  });
  if (cursor < text.length) {
    fragment.appendChild(document.createTextNode(text.slice(cursor)));
  }
  return fragment;
}

export function renderTask(
  container: HTMLElement,
  task: TaskView,
  buffer: SpanTriple[],
  provenance: Map<string, string>,
  labels: LabelInfo[],
  selected: number | null,
  heatmaps: Map<number, SaliencyPayload>,
  handlers: RenderHandlers,
): void {
  container.textContent = "";
  const text = task.data;
  const sentences: [number, number][] = task.sentences.length
    ? task.sentences
    : [[0, text.length]];

  sentences.forEach(([sentStart, sentEnd], sentIndex) => {
    const p = document.createElement("p");
    p.className = "sentence";
    p.dataset.index = String(sentIndex);
    const heat = heatmaps.get(sentIndex);
    let cursor = sentStart;

    for (const region of regionsForSentence(buffer, sentStart, sentEnd)) {
      if (region.start > cursor) {
        p.appendChild(document.createTextNode(text.slice(cursor, region.start)));
      }
      const wrap = document.createElement("span");
      wrap.className = "move-span";
      wrap.dataset.start = String(region.start);
      wrap.dataset.end = String(region.end);
      wrap.dataset.spans = region.spanIndexes.join(",");
      if (region.spanIndexes.includes(selected ?? -1)) {
        wrap.classList.add("selected");
      }
      const codes = region.spanIndexes.map((i) => buffer[i][2]);
      wrap.style.borderBottom = `3px solid ${colorOf(labels, codes[0])}`;

      const body = document.createElement("span");
      body.className = "span-text";
      const regionText = text.slice(region.start, region.end);
      if (heat) {
        body.appendChild(applyHeatmap(regionText, heat));
      } else {
        body.textContent = regionText;
      }
      wrap.appendChild(body);

      region.spanIndexes.forEach((spanIndex) => {
        const code = buffer[spanIndex][2];
        const chip = document.createElement("button");
        chip.type = "button";
        chip.className = "label-chip";
        chip.dataset.span = String(spanIndex);
        chip.textContent = code;
        chip.style.backgroundColor = colorOf(labels, code);
        chip.addEventListener("click", (event) => {
          event.stopPropagation();
          handlers.onSelectSpan(spanIndex);
        });
        wrap.appendChild(chip);

        const key = `${buffer[spanIndex][0]}:${buffer[spanIndex][1]}:${code}`;
        const badgeKind = provenance.get(key);
        if (badgeKind) {
          const badge = document.createElement("sup");
          badge.className = `badge badge-${badgeKind}`;
          badge.textContent = badgeKind;
          wrap.appendChild(badge);
        }
      });

      wrap.addEventListener("click", () => {
        handlers.onSelectSpan(region.spanIndexes[0]);
        const selection = window.getSelection?.();
        if (selection && selection.anchorNode && body.contains(selection.anchorNode)) {
          handlers.onCaret(region.start + selection.anchorOffset);
        }
      });
      p.appendChild(wrap);
      cursor = region.end;
    }
    if (cursor < sentEnd) {
      p.appendChild(document.createTextNode(text.slice(cursor, sentEnd)));
    }
    container.appendChild(p);
  });
}

export function renderPalette(
  container: HTMLElement, labels: LabelInfo[],
  onPick: (code: string) => void,
): void {
  container.textContent = "";
  labels.forEach((label, i) => {
    const button = document.createElement("button");
    button.type = "button";
    button.className = "palette-button";
    button.dataset.code = label.code;
    button.style.backgroundColor = label.color;
    button.textContent = `${i + 1} ${label.code}`;
    button.title = `${label.name}: ${label.definition}`;
    button.addEventListener("click", () => onPick(label.code));
    container.appendChild(button);
  });
}
