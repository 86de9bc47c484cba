// Turns clicks and key presses into set_reference messages. References are
// throttled to at most one per service tick; within a tick the last input
// wins, matching the server's own last-writer-wins handling. When the
// socket is closed the pending reference is dropped and flagged so the
// interface can show it.

import type { SetReferenceMessage, Vec3 } from "./protocol.js";

export const NUDGE_STEP = 0.25;

export type SendFn = (message: SetReferenceMessage) => boolean;

export class ReferenceInput {
  z: number;
  private pending: SetReferenceMessage | null = null;
  private lastSentAt = -Infinity;
  private lastSent: SetReferenceMessage | null = null;

  constructor(
    private readonly send: SendFn,
    private tickHz: number,
    startZ: number,
  ) {
    this.z = startZ;
  }

  setTickRate(tickHz: number): void {
    this.tickHz = tickHz;
  }

  get periodMs(): number {
    return 1000 / this.tickHz;
  }

  // click in world coordinates; altitude comes from the slider
  clickAt(wx: number, wy: number): void {
    this.pending = { type: "set_reference", x: wx, y: wy, z: this.z };
  }

  // arrow-key nudge relative to the last commanded reference, or to the
  // given pose before anything was commanded
  nudge(dx: number, dy: number, fallback: Vec3): void {
    const base = this.pending ?? this.lastSent;
    const x = (base ? base.x : fallback[0]) + dx * NUDGE_STEP;
    const y = (base ? base.y : fallback[1]) + dy * NUDGE_STEP;
    if (base && base.type === "set_reference") this.z = base.z;
    this.pending = { type: "set_reference", x, y, z: this.z };
  }

  setAltitude(z: number): void {
    this.z = z;
    const base = this.pending ?? this.lastSent;
    if (base) {
      this.pending = { type: "set_reference", x: base.x, y: base.y, z };
    }
  }

  // called from the animation loop; returns true if a reference was
  // dropped because the connection is down
  flush(now: number, connected: boolean): boolean {
    if (this.pending === null) return false;
    if (now - this.lastSentAt < this.periodMs) return false;
    const message = this.pending;
    this.pending = null;
    if (!connected || !this.send(message)) {
      return true;
    }
    this.lastSent = message;
    this.lastSentAt = now;
    return false;
  }

  get lastReference(): SetReferenceMessage | null {
    return this.pending ?? this.lastSent;
  }
}
