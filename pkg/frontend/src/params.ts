/** Cut/lift parameters mirrored from the server, with the same defaults. */

export interface ParamSpec {
  key: string;
  label: string;
  value: number | string | boolean;
  kind: "number" | "select" | "checkbox";
  options?: string[];
  step?: number;
}

export const PARAM_SPECS: ParamSpec[] = [
  { key: "tau", label: "coarse threshold τ", value: 0.9, kind: "number", step: 0.05 },
  { key: "mode", label: "weight mode", value: "soft", kind: "select", options: ["soft", "hard"] },
  { key: "zero_contribution_weight", label: "unseen splat weight", value: 0.0, kind: "number", step: 0.05 },
  { key: "k", label: "neighbors k", value: 10, kind: "number", step: 1 },
  { key: "gamma_pos", label: "γ position", value: 0.1, kind: "number", step: 0.05 },
  { key: "gamma_col", label: "γ color", value: 1.0, kind: "number", step: 0.1 },
  { key: "lambda", label: "λ pairwise", value: 0.5, kind: "number", step: 0.1 },
  { key: "lambda_n", label: "λ_n color term", value: 1.0, kind: "number", step: 0.1 },
  { key: "lambda_u", label: "λ_u cluster term", value: 1.0, kind: "number", step: 0.1 },
  { key: "clusters_src", label: "source clusters", value: 1, kind: "number", step: 1 },
  { key: "clusters_sink", label: "sink clusters", value: 4, kind: "number", step: 1 },
  { key: "conf_hi", label: "confidence high", value: 0.95, kind: "number", step: 0.01 },
  { key: "conf_lo", label: "confidence low", value: 0.05, kind: "number", step: 0.01 },
  { key: "normalize_extent", label: "normalize extent", value: false, kind: "checkbox" },
];

export type ParamValues = Record<string, number | string | boolean>;

export function defaultParams(): ParamValues {
  const out: ParamValues = {};
  for (const spec of PARAM_SPECS) out[spec.key] = spec.value;
  return out;
}

/** Only the entries that differ from the defaults, for the cut request. */
export function paramOverrides(values: ParamValues): ParamValues {
  const defaults = defaultParams();
  const out: ParamValues = {};
  for (const [key, value] of Object.entries(values)) {
    if (defaults[key] !== value) out[key] = value;
  }
  return out;
}
