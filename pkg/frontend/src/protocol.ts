// Wire messages exchanged with the teleoperation service. The client only
// ever reads these shapes; it never applies safety logic of its own.

export type Vec3 = [number, number, number];

export interface ScenePrimitive {
  type: "box" | "sphere" | "ground_plane";
  center?: Vec3;
  size?: Vec3;
  radius?: number;
  z?: number;
}

export interface SceneMessage {
  type: "scene";
  primitives: ScenePrimitive[];
  map: { origin: Vec3; extent: Vec3; resolution: number };
  start: Vec3;
  start_yaw: number;
  h_b: number;
  tick_hz: number;
}

export interface TelemetryMessage {
  type: "telemetry";
  k: number;
  pose: Vec3;
  u_teleop: Vec3;
  u_filtered: Vec3;
  h_eff: number;
  status: string;
  metrics: { d: number; n_c: number; h_min: number; mean_correction: number };
}

export interface MapSliceMessage {
  type: "map_slice";
  axis: "x" | "y" | "z";
  coord: number;
  col_axis: string;
  row_axis: string;
  origin: [number, number];
  resolution: number;
  width: number;
  height: number;
  h_b: number;
  // row-major, rows along row_axis ascending
  values: number[];
}

export type ServerMessage = SceneMessage | TelemetryMessage | MapSliceMessage;

export interface SetReferenceMessage {
  type: "set_reference";
  x: number;
  y: number;
  z: number;
}

export interface SetYawMessage {
  type: "set_yaw";
  yaw: number;
}

export interface ToggleFilterMessage {
  type: "toggle_filter";
  enabled: boolean;
}

export interface ResetMessage {
  type: "reset";
}

export type ClientMessage =
  | SetReferenceMessage
  | SetYawMessage
  | ToggleFilterMessage
  | ResetMessage;

export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const type = (data as { type?: unknown }).type;
  if (type === "scene" || type === "telemetry" || type === "map_slice") {
    return data as ServerMessage;
  }
  return null;
}
