import { describe, expect, it } from "vitest";
import { ScribbleStore, strokeToPixels } from "../src/scribble.js";
import type { Pixel } from "../src/types.js";

describe("strokeToPixels", () => {
  it("stamps a single disk for a zero-length stroke", () => {
    const pixels = strokeToPixels([[10, 10]], 2, 64, 64);
    // Euclidean disk of radius 2: 13 pixels.
    expect(pixels).toHaveLength(13);
    expect(pixels).toContainEqual([10, 10]);
    expect(pixels).toContainEqual([12, 10]);
    expect(pixels).not.toContainEqual([12, 12]);
  });

  it("radius zero marks exactly the stroke samples", () => {
    const pixels = strokeToPixels([[3, 3]], 0, 8, 8);
    expect(pixels).toEqual([[3, 3]]);
  });

  it("connects segment endpoints without gaps", () => {
    const pixels = strokeToPixels([[0, 0], [7, 0]], 0, 16, 16);
    const xs = pixels.map(([x]) => x).sort((a, b) => a - b);
    expect(xs).toEqual([0, 1, 2, 3, 4, 5, 6, 7]);
  });

  it("clips to the canvas", () => {
    const inside = strokeToPixels([[0, 0]], 3, 32, 32);
    expect(inside.every(([x, y]) => x >= 0 && y >= 0)).toBe(true);
  });

  it("returns an empty set for a stroke fully outside the image", () => {
    expect(strokeToPixels([[100, 100], [120, 120]], 3, 32, 32)).toEqual([]);
  });

  it("deduplicates overlapping stamps", () => {
    const once = strokeToPixels([[5, 5]], 2, 32, 32);
    const twice = strokeToPixels([[5, 5], [5, 5], [5, 5]], 2, 32, 32);
    expect(twice.length).toBe(once.length);
  });
});

describe("ScribbleStore", () => {
  it("later set wins for a contested pixel", () => {
    const store = new ScribbleStore();
    store.addStroke(0, "fg", [[4, 4], [5, 5]]);
    store.addStroke(0, "bg", [[5, 5]]);
    expect(store.counts(0)).toEqual({ fg: 1, bg: 1 });
    const { fg, bg } = store.pixels(0);
    expect(fg).toContainEqual([4, 4]);
    expect(bg).toContainEqual([5, 5]);
  });

  it("keeps views independent", () => {
    const store = new ScribbleStore();
    store.addStroke(0, "fg", [[1, 1]]);
    store.addStroke(3, "bg", [[2, 2]]);
    expect(store.counts(0)).toEqual({ fg: 1, bg: 0 });
    expect(store.counts(3)).toEqual({ fg: 0, bg: 1 });
    store.clearView(0);
    expect(store.counts(0)).toEqual({ fg: 0, bg: 0 });
    expect(store.counts(3)).toEqual({ fg: 0, bg: 1 });
  });

  it("tracks pending flushes per touched view and clears them", () => {
    const store = new ScribbleStore();
    store.addStroke(2, "fg", [[1, 1]]);
    store.addStroke(1, "bg", [[0, 0]]);
    const flushes = store.pendingFlushes();
    expect(flushes.map((f) => f.view)).toEqual([1, 2]);
    expect(flushes.every((f) => f.replace)).toBe(true);
    store.markFlushed();
    expect(store.pendingFlushes()).toEqual([]);
    store.addStroke(2, "fg", [[9, 9]]);
    expect(store.pendingFlushes().map((f) => f.view)).toEqual([2]);
  });

  it("hasAny reflects accumulated scribbles", () => {
    const store = new ScribbleStore();
    expect(store.hasAny()).toBe(false);
    store.addStroke(0, "fg", [[1, 1]]);
    expect(store.hasAny()).toBe(true);
    store.clearView(0);
    expect(store.hasAny()).toBe(false);
  });

  it("ignores empty strokes", () => {
    const store = new ScribbleStore();
    store.addStroke(0, "fg", [] as Pixel[]);
    expect(store.hasAny()).toBe(false);
    expect(store.pendingFlushes()).toEqual([]);
  });
});
