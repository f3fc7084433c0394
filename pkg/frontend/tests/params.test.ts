import { describe, expect, it } from "vitest";
import { defaultParams, paramOverrides } from "../src/params.js";

describe("parameter defaults", () => {
  it("mirrors the server defaults", () => {
    const params = defaultParams();
    expect(params.k).toBe(10);
    expect(params.lambda).toBe(0.5);
    expect(params.lambda_n).toBe(1.0);
    expect(params.lambda_u).toBe(1.0);
    expect(params.clusters_src).toBe(1);
    expect(params.clusters_sink).toBe(4);
    expect(params.tau).toBe(0.9);
    expect(params.gamma_pos).toBe(0.1);
    expect(params.gamma_col).toBe(1.0);
    expect(params.conf_hi).toBe(0.95);
    expect(params.conf_lo).toBe(0.05);
    expect(params.mode).toBe("soft");
    expect(params.zero_contribution_weight).toBe(0.0);
    expect(params.normalize_extent).toBe(false);
  });

  it("overrides contain only changed values", () => {
    const params = defaultParams();
    expect(paramOverrides(params)).toEqual({});
    params.k = 25;
    params.tau = 0.3;
    expect(paramOverrides(params)).toEqual({ k: 25, tau: 0.3 });
  });
});
