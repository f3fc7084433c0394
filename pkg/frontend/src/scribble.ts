/** Stroke rasterization and the per-view scribble store. */
import type { BrushKind, Pixel } from "./types.js";

const key = (p: Pixel): string => `${p[0]},${p[1]}`;
const fromKey = (s: string): Pixel => {
  const [x, y] = s.split(",");
  return [Number(x), Number(y)];
};

/**
 * Rasterize a stroke to a pixel set by stamping a disk of the given radius
 * at unit steps along each segment. A zero-length stroke is a single disk.
 * Pixels outside the image are dropped.
 */
export function strokeToPixels(
  path: Pixel[],
  radius: number,
  width: number,
  height: number,
): Pixel[] {
  if (path.length === 0) return [];
  const seen = new Set<string>();
  const stamp = (cx: number, cy: number) => {
    const r = Math.max(0, radius);
    for (let dy = -Math.ceil(r); dy <= Math.ceil(r); dy++) {
      for (let dx = -Math.ceil(r); dx <= Math.ceil(r); dx++) {
        if (dx * dx + dy * dy > r * r) continue;
        const x = Math.round(cx + dx);
        const y = Math.round(cy + dy);
        if (x < 0 || y < 0 || x >= width || y >= height) continue;
        seen.add(key([x, y]));
      }
    }
  };
  stamp(path[0][0], path[0][1]);
  for (let i = 1; i < path.length; i++) {
    const [x0, y0] = path[i - 1];
    const [x1, y1] = path[i];
    const steps = Math.max(1, Math.ceil(Math.hypot(x1 - x0, y1 - y0)));
    for (let s = 1; s <= steps; s++) {
      stamp(x0 + ((x1 - x0) * s) / steps, y0 + ((y1 - y0) * s) / steps);
    }
  }
  return [...seen].map(fromKey);
}

interface ViewScribbles {
  fg: Set<string>;
  bg: Set<string>;
}

/**
 * Client-side scribbles, one pair of pixel sets per view. Mirrors the
 * server's rule: a pixel belongs to whichever set marked it last. Tracks
 * which views have queued (unflushed) changes.
 */
export class ScribbleStore {
  private views = new Map<number, ViewScribbles>();
  private dirty = new Set<number>();

  private forView(view: number): ViewScribbles {
    let entry = this.views.get(view);
    if (!entry) {
      entry = { fg: new Set(), bg: new Set() };
      this.views.set(view, entry);
    }
    return entry;
  }

  addStroke(view: number, kind: BrushKind, pixels: Pixel[]): void {
    if (pixels.length === 0) return;
    const entry = this.forView(view);
    const target = kind === "fg" ? entry.fg : entry.bg;
    const other = kind === "fg" ? entry.bg : entry.fg;
    for (const p of pixels) {
      const k = key(p);
      target.add(k);
      other.delete(k);
    }
    this.dirty.add(view);
  }

  clearView(view: number): void {
    this.views.delete(view);
    this.dirty.add(view);
  }

  counts(view: number): { fg: number; bg: number } {
    const entry = this.views.get(view);
    return { fg: entry?.fg.size ?? 0, bg: entry?.bg.size ?? 0 };
  }

  pixels(view: number): { fg: Pixel[]; bg: Pixel[] } {
    const entry = this.views.get(view);
    return {
      fg: entry ? [...entry.fg].map(fromKey) : [],
      bg: entry ? [...entry.bg].map(fromKey) : [],
    };
  }

  hasAny(): boolean {
    for (const entry of this.views.values()) {
      if (entry.fg.size || entry.bg.size) return true;
    }
    return false;
  }

  /** Views changed since the last flush, with full replacement payloads. */
  pendingFlushes(): { view: number; fg: Pixel[]; bg: Pixel[]; replace: true }[] {
    return [...this.dirty].sort((a, b) => a - b).map((view) => ({
      view,
      ...this.pixels(view),
      replace: true as const,
    }));
  }

  markFlushed(): void {
    this.dirty.clear();
  }
}
