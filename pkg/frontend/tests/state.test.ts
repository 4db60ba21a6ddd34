import { describe, expect, it } from "vitest";

import {
  InvalidEdit,
  deleteSpan,
  mergeWithNext,
  relabelSpan,
  spansEqual,
  splitSpan,
} from "../src/state.js";
import type { SpanTriple } from "../src/types.js";

const TEXT = "While networks work well, attention is not understood.";

describe("relabelSpan", () => {
  it("changes only the label", () => {
    const spans: SpanTriple[] = [[0, 10, "MTD"], [11, 20, "RST"]];
    const next = relabelSpan(spans, 0, "PUR");
    expect(next).toEqual([[0, 10, "PUR"], [11, 20, "RST"]]);
    expect(spans[0][2]).toBe("MTD"); // input untouched
  });

  it("rejects a duplicate co-extensive label", () => {
    const spans: SpanTriple[] = [[0, 10, "MTD"], [0, 10, "PUR"]];
    expect(() => relabelSpan(spans, 0, "PUR")).toThrow(InvalidEdit);
  });

  it("rejects a bad index", () => {
    expect(() => relabelSpan([], 0, "PUR")).toThrow(InvalidEdit);
  });
});

describe("splitSpan", () => {
  it("splits at a boundary and skips the whitespace", () => {
    const spans: SpanTriple[] = [[0, TEXT.length, "BAC"]];
    const boundary = TEXT.indexOf("attention");
    const next = splitSpan(spans, 0, boundary, "BAC", "GAP", TEXT);
    expect(next).toEqual([
      [0, boundary - 1, "BAC"],
      [boundary, TEXT.length, "GAP"],
    ]);
    expect(TEXT.slice(next[0][0], next[0][1]).endsWith("well,")).toBe(true);
    expect(TEXT.slice(next[1][0], next[1][1]).startsWith("attention")).toBe(true);
  });

  it("rejects offsets outside the span", () => {
    const spans: SpanTriple[] = [[10, 20, "BAC"]];
    for (const bad of [5, 10, 20, 25]) {
      expect(() => splitSpan(spans, 0, bad, "BAC", "GAP", TEXT))
        .toThrow(InvalidEdit);
    }
  });
});

describe("mergeWithNext and deleteSpan", () => {
  it("merges two adjacent spans into the first label", () => {
    const spans: SpanTriple[] = [[0, 10, "BAC"], [11, 20, "GAP"]];
    expect(mergeWithNext(spans, 0)).toEqual([[0, 20, "BAC"]]);
  });

  it("deletes a span", () => {
    const spans: SpanTriple[] = [[0, 10, "BAC"], [11, 20, "GAP"]];
    expect(deleteSpan(spans, 1)).toEqual([[0, 10, "BAC"]]);
  });
});

describe("spansEqual", () => {
  it("is order-insensitive", () => {
    expect(spansEqual(
      [[11, 20, "GAP"], [0, 10, "BAC"]],
      [[0, 10, "BAC"], [11, 20, "GAP"]],
    )).toBe(true);
    expect(spansEqual([[0, 10, "BAC"]], [[0, 10, "GAP"]])).toBe(false);
  });
});
