// Latest-value buffer between the websocket and the render loop. Message
// receipt only stores data; the animation frame reads whatever is newest,
// so rendering never lags behind a bursty socket.

import type {
  MapSliceMessage,
  SceneMessage,
  ServerMessage,
  TelemetryMessage,
  Vec3,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

const TRAIL_LIMIT = 600;
// telemetry older than this many tick periods grays the view out
const STALE_TICKS = 3;

export interface ViewState {
  connection: ConnectionStatus;
  scene: SceneMessage | null;
  telemetry: TelemetryMessage | null;
  slice: MapSliceMessage | null;
  sliceGeneration: number;
  trail: Vec3[];
  lastTelemetryAt: number | null;
  // a reference was dropped while disconnected; cleared on the next send
  droppedInput: boolean;
}

export function initialViewState(): ViewState {
  return {
    connection: "connecting",
    scene: null,
    telemetry: null,
    slice: null,
    sliceGeneration: 0,
    trail: [],
    lastTelemetryAt: null,
    droppedInput: false,
  };
}

export function applyMessage(
  state: ViewState,
  message: ServerMessage,
  now: number,
): void {
  if (message.type === "scene") {
    state.scene = message;
    state.trail = [];
  } else if (message.type === "telemetry") {
    if (state.telemetry !== null && message.k < state.telemetry.k) {
      // a session reset restarts the step counter; drop the old trail
      state.trail = [];
    }
    state.telemetry = message;
    state.lastTelemetryAt = now;
    state.trail.push(message.pose);
    if (state.trail.length > TRAIL_LIMIT) {
      state.trail.splice(0, state.trail.length - TRAIL_LIMIT);
    }
  } else if (message.type === "map_slice") {
    state.slice = message;
    state.sliceGeneration += 1;
  }
}

export function isStale(state: ViewState, now: number): boolean {
  if (state.lastTelemetryAt === null) return true;
  const tickHz = state.scene?.tick_hz ?? 6;
  return now - state.lastTelemetryAt > (STALE_TICKS * 1000) / tickHz;
}
