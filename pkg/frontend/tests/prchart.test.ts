import { describe, expect, it } from "vitest";

import { prChartSvg, prPath } from "../src/prchart";

describe("prPath", () => {
  it("maps recall/precision into the plot box", () => {
    const path = prPath(
      [
        [0, 1],
        [1, 0],
      ],
      { width: 100, height: 100, pad: 10 },
    );
    // recall 0, precision 1 -> top-left of the plot area; recall 1,
    // precision 0 -> bottom-right
    expect(path).toBe("M10 10 L90 90");
  });

  it("is empty for no points", () => {
    expect(prPath([])).toBe("");
  });
});

describe("prChartSvg", () => {
  it("produces an svg with axis and curve", () => {
    const svg = prChartSvg([
      [0.05, 1],
      [1, 0.5],
    ]);
    expect(svg).toContain("<svg");
    expect(svg).toContain("pr-axis");
    expect(svg).toContain("pr-line");
  });
});
