/** DOM wiring: view picker, scribble canvas, parameter panel, cut/export. */
import { ApiError, exportUrl, fetchViews, postCut, postScribbles, renderUrl } from "./api.js";
import { PARAM_SPECS, paramOverrides } from "./params.js";
import { strokeToPixels } from "./scribble.js";
import { UiState } from "./state.js";
import type { DisplayMode, Pixel } from "./types.js";

const state = new UiState();

const el = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

const frame = () => el<HTMLImageElement>("frame");
const annotation = () => el<HTMLCanvasElement>("annotation");
const hint = () => el<HTMLDivElement>("hint");

let frameAbort: AbortController | null = null;

function showHint(text: string, isError = false): void {
  hint().textContent = text;
  hint().className = isError ? "hint error" : "hint";
}

async function refreshFrame(): Promise<void> {
  if (frameAbort) frameAbort.abort();
  frameAbort = new AbortController();
  const mode: DisplayMode = state.displayMode;
  const overlay = mode === "overlay";
  const url = renderUrl(state.currentView, overlay ? "full" : mode,
    overlay, state.generation);
  try {
    const resp = await fetch(url, { signal: frameAbort.signal });
    if (!resp.ok) return;
    const blob = await resp.blob();
    frame().src = URL.createObjectURL(blob);
  } catch (err) {
    if ((err as Error).name !== "AbortError") throw err;
  }
}

function drawStroke(pixels: Pixel[], kind: "fg" | "bg"): void {
  const ctx = annotation().getContext("2d")!;
  ctx.fillStyle = kind === "fg" ? "rgba(255,40,40,0.8)" : "rgba(50,80,255,0.8)";
  for (const [x, y] of pixels) ctx.fillRect(x, y, 1, 1);
}

function clearAnnotation(): void {
  const ctx = annotation().getContext("2d")!;
  ctx.clearRect(0, 0, annotation().width, annotation().height);
}

function redrawAnnotation(): void {
  clearAnnotation();
  const { fg, bg } = state.scribbles.pixels(state.currentView);
  drawStroke(fg, "fg");
  drawStroke(bg, "bg");
}

function updateControls(): void {
  el<HTMLButtonElement>("run-cut").disabled = !state.canCut;
  el<HTMLButtonElement>("export-fg").disabled = !state.canExport;
  el<HTMLButtonElement>("export-bg").disabled = !state.canExport;
  for (const mode of ["full", "overlay", "fg", "bg"] as const) {
    const button = el<HTMLButtonElement>(`mode-${mode}`);
    button.disabled = !state.modeEnabled(mode);
    button.classList.toggle("active", state.displayMode === mode);
  }
  const counts = state.scribbles.counts(state.currentView);
  el<HTMLSpanElement>("scribble-counts").textContent =
    `fg ${counts.fg}px / bg ${counts.bg}px`;
}

function showSummary(): void {
  const s = state.lastSummary;
  if (!s) return;
  const fmt = (v: number | null) => (v === null ? "-" : v.toFixed(3));
  el<HTMLDivElement>("summary").innerHTML = `
    <b>${s.n_fg}</b> foreground / <b>${s.n_bg}</b> background splats<br>
    energy cut ${fmt(s.energy_cut)} vs coarse ${fmt(s.energy_coarse)};
    flow ${fmt(s.flow_value)}<br>
    ${Object.entries(s.runtime_ms).map(([k, v]) => `${k} ${v.toFixed(0)}ms`).join(", ")}`;
}

function buildParamPanel(): void {
  const panel = el<HTMLDivElement>("params");
  for (const spec of PARAM_SPECS) {
    const row = document.createElement("label");
    row.className = "param-row";
    const caption = document.createElement("span");
    caption.textContent = spec.label;
    row.appendChild(caption);
    if (spec.kind === "select") {
      const select = document.createElement("select");
      for (const option of spec.options ?? []) {
        const opt = document.createElement("option");
        opt.value = option;
        opt.textContent = option;
        select.appendChild(opt);
      }
      select.value = String(spec.value);
      select.addEventListener("change", () => {
        state.params[spec.key] = select.value;
      });
      row.appendChild(select);
    } else if (spec.kind === "checkbox") {
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = Boolean(spec.value);
      box.addEventListener("change", () => {
        state.params[spec.key] = box.checked;
      });
      row.appendChild(box);
    } else {
      const input = document.createElement("input");
      input.type = "number";
      input.step = String(spec.step ?? 0.1);
      input.value = String(spec.value);
      input.addEventListener("change", () => {
        state.params[spec.key] = Number(input.value);
      });
      row.appendChild(input);
    }
    panel.appendChild(row);
  }
}

function buildViewPicker(): void {
  const picker = el<HTMLSelectElement>("view-picker");
  picker.innerHTML = "";
  for (const view of state.views) {
    const opt = document.createElement("option");
    opt.value = String(view.id);
    opt.textContent = `${view.id}: ${view.img_name}`;
    picker.appendChild(opt);
  }
  picker.addEventListener("change", () => {
    state.switchView(Number(picker.value));
    const view = state.views[state.currentView];
    annotation().width = view.width;
    annotation().height = view.height;
    redrawAnnotation();
    updateControls();
    void refreshFrame();
  });
}

function attachCanvas(): void {
  const canvas = annotation();
  let stroke: Pixel[] = [];
  let drawing = false;

  const toPixel = (ev: MouseEvent): Pixel => {
    const rect = canvas.getBoundingClientRect();
    const view = state.views[state.currentView];
    return [
      Math.floor(((ev.clientX - rect.left) / rect.width) * view.width),
      Math.floor(((ev.clientY - rect.top) / rect.height) * view.height),
    ];
  };

  canvas.addEventListener("mousedown", (ev) => {
    drawing = true;
    stroke = [toPixel(ev)];
  });
  canvas.addEventListener("mousemove", (ev) => {
    if (drawing) stroke.push(toPixel(ev));
  });
  const finish = () => {
    if (!drawing) return;
    drawing = false;
    const view = state.views[state.currentView];
    const pixels = strokeToPixels(stroke, state.brush.radius,
      view.width, view.height);
    state.scribbles.addStroke(state.currentView, state.brush.kind, pixels);
    redrawAnnotation();
    updateControls();
  };
  canvas.addEventListener("mouseup", finish);
  canvas.addEventListener("mouseleave", finish);
}

async function runCut(): Promise<void> {
  try {
    state.beginCut();
    updateControls();
    showHint("flushing scribbles…");
    for (const payload of state.scribbles.pendingFlushes()) {
      await postScribbles(payload);
    }
    state.scribbles.markFlushed();
    showHint("cutting…");
    const summary = await postCut(paramOverrides(state.params));
    state.finishCut(summary);
    showSummary();
    showHint("done");
    await refreshFrame();
  } catch (err) {
    state.failCut();
    if (err instanceof ApiError && err.status === 422) {
      showHint(`${err.detail} — add more scribbles`, true);
    } else {
      showHint(String(err), true);
    }
  } finally {
    updateControls();
  }
}

async function init(): Promise<void> {
  state.views = await fetchViews();
  buildViewPicker();
  buildParamPanel();
  attachCanvas();
  const view = state.views[0];
  annotation().width = view.width;
  annotation().height = view.height;

  el<HTMLButtonElement>("run-cut").addEventListener("click", () => void runCut());
  el<HTMLButtonElement>("brush-fg").addEventListener("click", () => {
    state.brush.kind = "fg";
    el<HTMLButtonElement>("brush-fg").classList.add("active");
    el<HTMLButtonElement>("brush-bg").classList.remove("active");
  });
  el<HTMLButtonElement>("brush-bg").addEventListener("click", () => {
    state.brush.kind = "bg";
    el<HTMLButtonElement>("brush-bg").classList.add("active");
    el<HTMLButtonElement>("brush-fg").classList.remove("active");
  });
  el<HTMLInputElement>("brush-radius").addEventListener("change", (ev) => {
    state.brush.radius = Number((ev.target as HTMLInputElement).value);
  });
  el<HTMLButtonElement>("clear-view").addEventListener("click", () => {
    state.scribbles.clearView(state.currentView);
    redrawAnnotation();
    updateControls();
  });
  for (const mode of ["full", "overlay", "fg", "bg"] as const) {
    el<HTMLButtonElement>(`mode-${mode}`).addEventListener("click", () => {
      state.setDisplayMode(mode);
      updateControls();
      void refreshFrame();
    });
  }
  el<HTMLButtonElement>("export-fg").addEventListener("click", () => {
    window.location.href = exportUrl("fg");
  });
  el<HTMLButtonElement>("export-bg").addEventListener("click", () => {
    window.location.href = exportUrl("bg");
  });

  updateControls();
  await refreshFrame();
}

void init();
