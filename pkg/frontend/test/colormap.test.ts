import { describe, expect, it } from "vitest";

import { colorFor, sliceToRgba } from "../src/colormap.js";
import type { MapSliceMessage } from "../src/protocol.js";

function sliceWith(values: number[], width: number, height: number): MapSliceMessage {
  return {
    type: "map_slice",
    axis: "z",
    coord: 1.0,
    col_axis: "x",
    row_axis: "y",
    origin: [0, 0],
    resolution: 0.1,
    width,
    height,
    h_b: 0.5,
    values,
  };
}

describe("colormap", () => {
  it("shades positive distances blue and negative ones red", () => {
    for (const h of [0.05, 0.2, 0.5]) {
      const [r, g, b] = colorFor(h, 0.5);
      expect(b).toBeGreaterThan(r);
      expect(b).toBeGreaterThan(g);
    }
    for (const h of [-0.05, -0.2, -0.5]) {
      const [r, g, b] = colorFor(h, 0.5);
      expect(r).toBeGreaterThan(g);
      expect(r).toBeGreaterThan(b);
    }
  });

  it("clamps beyond the truncation bound", () => {
    expect(colorFor(0.5, 0.5)).toEqual(colorFor(99, 0.5));
    expect(colorFor(-0.5, 0.5)).toEqual(colorFor(-99, 0.5));
  });

  it("renders a uniform negative slice as one red field", () => {
    const slice = sliceWith(new Array(12).fill(-0.5), 4, 3);
    const rgba = sliceToRgba(slice);
    const [r, g, b] = colorFor(-0.5, 0.5);
    for (let i = 0; i < rgba.length; i += 4) {
      expect([rgba[i], rgba[i + 1], rgba[i + 2], rgba[i + 3]]).toEqual([r, g, b, 255]);
    }
  });

  it("flips rows so the highest row coordinate is on top", () => {
    // row 0 clear, row 1 unsafe; on screen the unsafe row comes first
    const slice = sliceWith([0.5, 0.5, -0.5, -0.5], 2, 2);
    const rgba = sliceToRgba(slice);
    const blue = colorFor(0.5, 0.5);
    const red = colorFor(-0.5, 0.5);
    expect([rgba[0], rgba[1], rgba[2]]).toEqual(red);
    expect([rgba[8], rgba[9], rgba[10]]).toEqual(blue);
  });
});
