import { describe, expect, it } from "vitest";

import { Viewport } from "../src/viewport.js";

// deterministic pseudo-random points
function lcg(seed: number): () => number {
  let s = seed;
  return () => {
    s = (s * 1103515245 + 12345) % 2147483648;
    return s / 2147483648;
  };
}

describe("viewport", () => {
  const layout = { origin: [-2, -1.5] as [number, number], resolution: 0.1, width: 40, height: 30 };

  it("round-trips canvas coordinates within one pixel", () => {
    const rand = lcg(7);
    for (const [w, h] of [[800, 600], [640, 480], [900, 400]]) {
      const vp = new Viewport(layout, w!, h!);
      for (let i = 0; i < 500; i++) {
        const px = rand() * w!;
        const py = rand() * h!;
        const [wx, wy] = vp.canvasToWorld(px, py);
        const [qx, qy] = vp.worldToCanvas(wx, wy);
        expect(Math.abs(qx - px)).toBeLessThan(1);
        expect(Math.abs(qy - py)).toBeLessThan(1);
      }
    }
  });

  it("round-trips world coordinates within one pixel of world size", () => {
    const vp = new Viewport(layout, 800, 600);
    const rand = lcg(11);
    const pixelWorld = 1 / vp.scale;
    for (let i = 0; i < 500; i++) {
      const wx = -2 + rand() * 4;
      const wy = -1.5 + rand() * 3;
      const [px, py] = vp.worldToCanvas(wx, wy);
      const [qx, qy] = vp.canvasToWorld(px, py);
      expect(Math.abs(qx - wx)).toBeLessThan(pixelWorld);
      expect(Math.abs(qy - wy)).toBeLessThan(pixelWorld);
    }
  });

  it("maps the canvas center of an origin-centered slice to (0, 0)", () => {
    const vp = new Viewport(layout, 800, 600);
    const [wx, wy] = vp.canvasToWorld(400, 300);
    expect(wx).toBeCloseTo(0, 9);
    expect(wy).toBeCloseTo(0, 9);
  });

  it("puts larger row coordinates higher on the screen", () => {
    const vp = new Viewport(layout, 800, 600);
    const [, lowY] = vp.worldToCanvas(0, -1.0);
    const [, highY] = vp.worldToCanvas(0, 1.0);
    expect(highY).toBeLessThan(lowY);
  });

  it("letterboxes without distorting aspect ratio", () => {
    const vp = new Viewport(layout, 900, 400);
    // height-limited: 400 / 3.0 world meters
    expect(vp.scale).toBeCloseTo(400 / 3.0, 9);
    const [x, y, w, h] = vp.imageRect();
    expect(y).toBeCloseTo(0, 9);
    expect(h).toBeCloseTo(400, 9);
    expect(x).toBeGreaterThan(0);
    expect(w).toBeLessThan(900);
  });

  it("reports clicks outside the slice as not contained", () => {
    const vp = new Viewport(layout, 900, 400);
    expect(vp.contains(450, 200)).toBe(true);
    expect(vp.contains(5, 200)).toBe(false);
  });
});
