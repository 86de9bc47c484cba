// Canvas drawing for the operator view: distance-field slice underneath,
// vehicle trail, commanded (red) and filtered (white) reference markers,
// and a metrics readout. Everything drawn in one frame comes from the same
// telemetry message, so markers can never mix ticks.

import type { MapSliceMessage, Vec3 } from "./protocol.js";
import type { ViewState } from "./view_state.js";
import { isStale } from "./view_state.js";
import { Viewport } from "./viewport.js";

export const COLORS = {
  background: "#10141a",
  commanded: "#e53935",
  filtered: "#ffffff",
  vehicle: "#ffb300",
  trail: "rgba(255, 179, 0, 0.55)",
  link: "#eceff1",
  hud: "#d7dde5",
  staleOverlay: "rgba(70, 75, 82, 0.55)",
  dropped: "#ff6e40",
};

export const MARKER_RADIUS = { commanded: 7, filtered: 4.5, vehicle: 5.5 };

// structural subset of CanvasRenderingContext2D, so tests can record calls
export interface Canvas2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  drawImage(image: unknown, dx: number, dy: number, dw: number, dh: number): void;
}

const AXIS_INDEX: Record<string, number> = { x: 0, y: 1, z: 2 };

// project a world point onto the slice plane's (column, row) coordinates
export function planeCoords(
  p: Vec3,
  slice: Pick<MapSliceMessage, "col_axis" | "row_axis">,
): [number, number] {
  const c = p[AXIS_INDEX[slice.col_axis] ?? 0] ?? 0;
  const r = p[AXIS_INDEX[slice.row_axis] ?? 1] ?? 0;
  return [c, r];
}

export function viewportFor(
  view: ViewState,
  canvasWidth: number,
  canvasHeight: number,
): Viewport | null {
  if (view.slice === null) return null;
  return new Viewport(view.slice, canvasWidth, canvasHeight);
}

function dot(ctx: Canvas2D, x: number, y: number, r: number, color: string): void {
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x, y, r, 0, Math.PI * 2);
  ctx.fill();
}

export interface FrameOptions {
  width: number;
  height: number;
  // prerendered slice pixels (an offscreen canvas in the browser)
  sliceBitmap: unknown | null;
  now: number;
}

export function renderFrame(
  ctx: Canvas2D,
  view: ViewState,
  options: FrameOptions,
): void {
  const { width, height, sliceBitmap, now } = options;
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, width, height);

  const viewport = viewportFor(view, width, height);
  if (viewport !== null && sliceBitmap !== null) {
    const [dx, dy, dw, dh] = viewport.imageRect();
    ctx.drawImage(sliceBitmap, dx, dy, dw, dh);
  }

  const slice = view.slice;
  if (viewport !== null && slice !== null) {
    if (view.trail.length > 1) {
      ctx.strokeStyle = COLORS.trail;
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      view.trail.forEach((p, i) => {
        const [c, r] = planeCoords(p, slice);
        const [px, py] = viewport.worldToCanvas(c, r);
        if (i === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      });
      ctx.stroke();
    }

    const telemetry = view.telemetry;
    if (telemetry !== null) {
      const [vc, vr] = planeCoords(telemetry.pose, slice);
      const [vx, vy] = viewport.worldToCanvas(vc, vr);
      dot(ctx, vx, vy, MARKER_RADIUS.vehicle, COLORS.vehicle);

      const [cc, cr] = planeCoords(telemetry.u_teleop, slice);
      const [fc, fr] = planeCoords(telemetry.u_filtered, slice);
      const [cx, cy] = viewport.worldToCanvas(cc, cr);
      const [fx, fy] = viewport.worldToCanvas(fc, fr);
      if (cx !== fx || cy !== fy) {
        // the filter moved the reference: tie the two markers together
        ctx.strokeStyle = COLORS.link;
        ctx.lineWidth = 1;
        ctx.beginPath();
        ctx.moveTo(cx, cy);
        ctx.lineTo(fx, fy);
        ctx.stroke();
      }
      dot(ctx, cx, cy, MARKER_RADIUS.commanded, COLORS.commanded);
      dot(ctx, fx, fy, MARKER_RADIUS.filtered, COLORS.filtered);
    }
  }

  drawHud(ctx, view, width, height, now);
}

function drawHud(
  ctx: Canvas2D,
  view: ViewState,
  width: number,
  height: number,
  now: number,
): void {
  ctx.font = "13px system-ui, sans-serif";
  const t = view.telemetry;
  const lines: string[] = [];
  if (t !== null) {
    lines.push(
      `k=${t.k}  status=${t.status}  h_eff=${t.h_eff.toFixed(3)} m`,
      `dist=${t.metrics.d.toFixed(2)} m  N_c=${t.metrics.n_c}` +
        `  h_min=${t.metrics.h_min.toFixed(3)} m` +
        `  |du|=${t.metrics.mean_correction.toFixed(3)} m`,
    );
  } else {
    lines.push("waiting for telemetry");
  }
  lines.push(`connection: ${view.connection}`);
  ctx.fillStyle = COLORS.hud;
  lines.forEach((line, i) => ctx.fillText(line, 10, 18 + i * 17));

  if (view.droppedInput) {
    ctx.fillStyle = COLORS.dropped;
    ctx.fillText("reference dropped: not connected", 10, 18 + lines.length * 17);
  }

  if (isStale(view, now)) {
    ctx.fillStyle = COLORS.staleOverlay;
    ctx.fillRect(0, 0, width, height);
    ctx.fillStyle = COLORS.hud;
    ctx.fillText("telemetry stale", width / 2 - 45, height / 2);
  }
}
