import { describe, expect, it } from "vitest";

import { scoreBarModel, ttiColor } from "../src/render.js";

describe("score bars", () => {
  it("pass streamed values through without renormalization", () => {
    const scores = { A: 7.123456, NULL: 2.5, E: 0.0 };
    const bars = scoreBarModel(scores, "A");
    expect(bars.map((b) => b.value)).toEqual([7.123456, 2.5, 0.0]);
    expect(bars.find((b) => b.plan === "A")?.active).toBe(true);
    expect(bars.find((b) => b.plan === "E")?.active).toBe(false);
  });

  it("clamps bar width, not the value", () => {
    const bars = scoreBarModel({ X: 1e6 }, null);
    expect(bars[0]?.widthPct).toBe(100);
    expect(bars[0]?.value).toBe(1e6);
  });
});

describe("tti colors", () => {
  it("orders severity bands", () => {
    const free = ttiColor(1.0);
    const heavy = ttiColor(5.0);
    expect(free).not.toBe(heavy);
    expect(ttiColor(1.5)).not.toBe(free);
  });
});
