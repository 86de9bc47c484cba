import { describe, expect, it } from "vitest";

import { NUDGE_STEP, ReferenceInput } from "../src/input.js";
import type { SetReferenceMessage } from "../src/protocol.js";
import { Viewport } from "../src/viewport.js";

function harness(tickHz = 5, startZ = 1.2) {
  const sent: SetReferenceMessage[] = [];
  const input = new ReferenceInput((m) => {
    sent.push(m);
    return true;
  }, tickHz, startZ);
  return { sent, input };
}

describe("reference input", () => {
  it("sends a click as a reference at the slider altitude", () => {
    const { sent, input } = harness();
    input.clickAt(1.5, 2.25);
    expect(input.flush(1000, true)).toBe(false);
    expect(sent).toEqual([{ type: "set_reference", x: 1.5, y: 2.25, z: 1.2 }]);
  });

  it("maps a center click on an origin-centered slice to (0, 0, z)", () => {
    const { sent, input } = harness();
    const vp = new Viewport(
      { origin: [-2, -1.5], resolution: 0.1, width: 40, height: 30 },
      800,
      600,
    );
    const [wx, wy] = vp.canvasToWorld(400, 300);
    input.clickAt(wx, wy);
    input.flush(0, true);
    expect(sent[0]?.x).toBeCloseTo(0, 9);
    expect(sent[0]?.y).toBeCloseTo(0, 9);
    expect(sent[0]?.z).toBe(1.2);
  });

  it("applies only the last reference within one tick period", () => {
    const { sent, input } = harness();
    input.clickAt(1, 1);
    input.clickAt(2, 2);
    input.clickAt(3, 3);
    input.flush(0, true);
    expect(sent).toHaveLength(1);
    expect(sent[0]?.x).toBe(3);

    // 5 Hz -> 200 ms period: the next flush inside it stays silent
    input.clickAt(4, 4);
    input.flush(100, true);
    expect(sent).toHaveLength(1);
    input.flush(205, true);
    expect(sent).toHaveLength(2);
    expect(sent[1]?.x).toBe(4);
  });

  it("nudges by 0.25 m from the pose before anything was commanded", () => {
    const { sent, input } = harness();
    input.nudge(1, 0, [2, 3, 1.2]);
    input.nudge(0, 1, [2, 3, 1.2]);
    input.flush(0, true);
    expect(sent).toEqual([
      { type: "set_reference", x: 2 + NUDGE_STEP, y: 3 + NUDGE_STEP, z: 1.2 },
    ]);
  });

  it("nudges relative to the last sent reference afterwards", () => {
    const { sent, input } = harness();
    input.clickAt(1, 1);
    input.flush(0, true);
    input.nudge(-1, 0, [9, 9, 9]);
    input.flush(300, true);
    expect(sent[1]).toEqual({ type: "set_reference", x: 1 - NUDGE_STEP, y: 1, z: 1.2 });
  });

  it("drops the pending reference when disconnected and reports it", () => {
    const { sent, input } = harness();
    input.clickAt(1, 1);
    expect(input.flush(0, false)).toBe(true);
    // dropped, not queued: reconnecting does not replay it
    expect(input.flush(300, true)).toBe(false);
    expect(sent).toHaveLength(0);
  });

  it("retargets the pending altitude when the slider moves", () => {
    const { sent, input } = harness();
    input.clickAt(1, 1);
    input.setAltitude(0.8);
    input.flush(0, true);
    expect(sent[0]?.z).toBe(0.8);
  });
});
