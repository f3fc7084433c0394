/** Thin typed client over the segmentation server's HTTP API. */
import type { CutSummary, Pixel, ViewInfo } from "./types.js";
import type { ParamValues } from "./params.js";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }
}

async function raiseIfFailed(resp: Response): Promise<void> {
  if (resp.ok) return;
  let detail = resp.statusText;
  try {
    const body = await resp.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(resp.status, detail);
}

export async function fetchViews(base = ""): Promise<ViewInfo[]> {
  const resp = await fetch(`${base}/api/views`);
  await raiseIfFailed(resp);
  return resp.json();
}

export function renderUrl(
  view: number,
  mode: string,
  overlay: boolean,
  generation: number,
  base = "",
): string {
  // generation busts the browser cache after each cut
  return `${base}/api/render?view=${view}&mode=${mode}` +
    `&overlay=${overlay ? 1 : 0}&gen=${generation}`;
}

export async function postScribbles(
  payload: { view: number; fg: Pixel[]; bg: Pixel[]; replace: boolean },
  base = "",
): Promise<Record<string, { fg: number; bg: number }>> {
  const resp = await fetch(`${base}/api/scribbles`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
  await raiseIfFailed(resp);
  return (await resp.json()).counts;
}

export async function postCut(
  params: ParamValues,
  source: "scribbles" | "masks" = "scribbles",
  base = "",
): Promise<CutSummary> {
  const resp = await fetch(`${base}/api/cut`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ source, params }),
  });
  await raiseIfFailed(resp);
  return resp.json();
}

export function exportUrl(side: "fg" | "bg", base = ""): string {
  return `${base}/api/export?side=${side}`;
}
