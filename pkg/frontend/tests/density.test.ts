import { describe, expect, it } from "vitest";

import { fallbackBetaGrid } from "../src/density.js";

describe("fallback density evaluator", () => {
  it("is flat at one for Beta(1,1)", () => {
    const grid = fallbackBetaGrid(1, 1, 64);
    for (const d of grid.density) {
      expect(d).toBeCloseTo(1.0, 10);
    }
  });

  it("peaks near the mode 1/9 for Beta(2,9)", () => {
    const grid = fallbackBetaGrid(2, 9, 512);
    const best = grid.theta[grid.density.indexOf(Math.max(...grid.density))];
    expect(Math.abs(best - 1 / 9)).toBeLessThan(1 / 513 + 1e-12);
  });

  it("is symmetric about one half when the shapes are equal", () => {
    const grid = fallbackBetaGrid(5, 5, 101);
    const n = grid.density.length;
    for (let i = 0; i < n / 2; i++) {
      expect(grid.density[i]).toBeCloseTo(grid.density[n - 1 - i], 8);
    }
  });

  it("uses the open grid i/(points+1)", () => {
    const grid = fallbackBetaGrid(2, 9, 7);
    expect(grid.theta[0]).toBeCloseTo(1 / 8, 12);
    expect(grid.theta[6]).toBeCloseTo(7 / 8, 12);
  });
});
