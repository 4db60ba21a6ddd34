// Pure edit-buffer operations over span triples. The buffer never
// touches the abstract text itself, only span metadata; every function
// returns a fresh sorted array and throws InvalidEdit on misuse, so a
// bad edit never reaches the server.

import type { SpanTriple } from "./types.js";

export class InvalidEdit extends Error {}

function sortSpans(spans: SpanTriple[]): SpanTriple[] {
  return [...spans].sort((a, b) => a[0] - b[0] || a[1] - b[1] ||
    a[2].localeCompare(b[2]));
}

function checkIndex(spans: SpanTriple[], index: number): void {
  if (index < 0 || index >= spans.length) {
    throw new InvalidEdit(`no span at index ${index}`);
  }
}

export function relabelSpan(
  spans: SpanTriple[], index: number, newLabel: string,
): SpanTriple[] {
  checkIndex(spans, index);
  const next = spans.map((s, i): SpanTriple =>
    i === index ? [s[0], s[1], newLabel] : [...s]);
  const [start, end] = next[index];
  const dupes = next.filter(
    (s) => s[0] === start && s[1] === end && s[2] === newLabel);
  if (dupes.length > 1) {
    throw new InvalidEdit(`span already labeled ${newLabel}`);
  }
  return sortSpans(next);
}

/** Split one span at `boundary` (an offset strictly inside it); the
 * whitespace around the boundary stays uncovered, matching how gold
 * multi-move sentences are annotated. */
export function splitSpan(
  spans: SpanTriple[], index: number, boundary: number,
  leftLabel: string, rightLabel: string, text: string,
): SpanTriple[] {
  checkIndex(spans, index);
  const [start, end] = spans[index];
  if (boundary <= start || boundary >= end) {
    throw new InvalidEdit(
      `split offset ${boundary} is outside span (${start}, ${end})`);
  }
  let leftEnd = boundary;
  while (leftEnd > start && /\s/.test(text[leftEnd - 1])) leftEnd -= 1;
  let rightStart = boundary;
  while (rightStart < end && /\s/.test(text[rightStart])) rightStart += 1;
  if (leftEnd <= start || rightStart >= end) {
    throw new InvalidEdit("split would leave an empty side");
  }
  const next: SpanTriple[] = spans.filter((_, i) => i !== index).map(
    (s): SpanTriple => [...s]);
  next.push([start, leftEnd, leftLabel], [rightStart, end, rightLabel]);
  return sortSpans(next);
}

/** Merge a span with the next span in offset order into one extent
 * carrying `label` (or the first span's label). */
export function mergeWithNext(
  spans: SpanTriple[], index: number, label?: string,
): SpanTriple[] {
  checkIndex(spans, index);
  checkIndex(spans, index + 1);
  const a = spans[index];
  const b = spans[index + 1];
  const merged: SpanTriple = [
    Math.min(a[0], b[0]), Math.max(a[1], b[1]), label ?? a[2]];
  const next: SpanTriple[] = spans
    .filter((_, i) => i !== index && i !== index + 1)
    .map((s): SpanTriple => [...s]);
  next.push(merged);
  return sortSpans(next);
}

export function deleteSpan(spans: SpanTriple[], index: number): SpanTriple[] {
  checkIndex(spans, index);
  return sortSpans(spans.filter((_, i) => i !== index).map((s): SpanTriple => [...s]));
}

export function spansEqual(a: SpanTriple[], b: SpanTriple[]): boolean {
  if (a.length !== b.length) return false;
  const sa = sortSpans(a);
  const sb = sortSpans(b);
  return sa.every((s, i) =>
    s[0] === sb[i][0] && s[1] === sb[i][1] && s[2] === sb[i][2]);
}
