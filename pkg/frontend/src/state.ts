/** UI state and its transitions; every number displayed originates from a
 * server response stored here. */
import type { Brush, CutSummary, DisplayMode, ViewInfo } from "./types.js";
import { ScribbleStore } from "./scribble.js";
import { ParamValues, defaultParams } from "./params.js";

export class UiState {
  views: ViewInfo[] = [];
  currentView = 0;
  brush: Brush = { kind: "fg", radius: 4 };
  scribbles = new ScribbleStore();
  params: ParamValues = defaultParams();
  lastSummary: CutSummary | null = null;
  displayMode: DisplayMode = "full";
  generation = 0;
  cutInFlight = false;

  get canCut(): boolean {
    return this.scribbles.hasAny() && !this.cutInFlight;
  }

  get canExport(): boolean {
    return this.lastSummary !== null;
  }

  modeEnabled(mode: DisplayMode): boolean {
    if (mode === "full") return true;
    return this.lastSummary !== null;
  }

  switchView(view: number): void {
    // scribbles are stored per view, so switching must not disturb them
    this.currentView = view;
  }

  setDisplayMode(mode: DisplayMode): void {
    if (!this.modeEnabled(mode)) {
      throw new Error(`display mode ${mode} needs a cut first`);
    }
    this.displayMode = mode;
  }

  beginCut(): void {
    if (!this.canCut) throw new Error("nothing to cut");
    this.cutInFlight = true;
  }

  finishCut(summary: CutSummary): void {
    this.cutInFlight = false;
    this.lastSummary = summary;
    this.generation += 1;
    this.displayMode = "overlay";
  }

  failCut(): void {
    this.cutInFlight = false;
  }
}
