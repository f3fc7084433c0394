export interface ViewInfo {
  id: number;
  img_name: string;
  width: number;
  height: number;
}

export interface CutSummary {
  n_fg: number;
  n_bg: number;
  energy_cut: number | null;
  energy_coarse: number | null;
  flow_value: number | null;
  runtime_ms: Record<string, number>;
  params: Record<string, number | string | boolean>;
}

export type BrushKind = "fg" | "bg";

export interface Brush {
  kind: BrushKind;
  radius: number;
}

export type DisplayMode = "full" | "overlay" | "fg" | "bg";

export type Pixel = [number, number];
