// Distance-to-color mapping for the slice view: shades of blue where the
// field is positive (clear space, darker blue farther from obstacles) and
// shades of red where it is negative (inside the margin or unobserved).

import type { MapSliceMessage } from "./protocol.js";

const FREE_NEAR: [number, number, number] = [236, 242, 250];
const FREE_FAR: [number, number, number] = [38, 84, 188];
const UNSAFE_NEAR: [number, number, number] = [250, 238, 236];
const UNSAFE_FAR: [number, number, number] = [186, 44, 36];

function mix(
  a: [number, number, number],
  b: [number, number, number],
  t: number,
): [number, number, number] {
  return [
    Math.round(a[0] + (b[0] - a[0]) * t),
    Math.round(a[1] + (b[1] - a[1]) * t),
    Math.round(a[2] + (b[2] - a[2]) * t),
  ];
}

export function colorFor(h: number, hB: number): [number, number, number] {
  const t = Math.max(-1, Math.min(1, h / hB));
  return t >= 0 ? mix(FREE_NEAR, FREE_FAR, t) : mix(UNSAFE_NEAR, UNSAFE_FAR, -t);
}

// RGBA pixels for the slice, flipped vertically so that row 0 of the
// output is the top of the screen (the largest row-axis coordinate).
export function sliceToRgba(slice: MapSliceMessage): Uint8ClampedArray<ArrayBuffer> {
  const { width, height, values, h_b } = slice;
  const out = new Uint8ClampedArray(new ArrayBuffer(width * height * 4));
  for (let row = 0; row < height; row++) {
    const srcRow = height - 1 - row;
    for (let col = 0; col < width; col++) {
      const h = values[srcRow * width + col] ?? -h_b;
      const [r, g, b] = colorFor(h, h_b);
      const i = (row * width + col) * 4;
      out[i] = r;
      out[i + 1] = g;
      out[i + 2] = b;
      out[i + 3] = 255;
    }
  }
  return out;
}
