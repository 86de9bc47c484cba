// Browser entry point: binds the websocket client, input handling, and the
// render loop to the page. All safety behavior lives on the server; this
// file only forwards operator intent and draws what comes back.

import { ServiceClient } from "./client.js";
import { sliceToRgba } from "./colormap.js";
import { ReferenceInput } from "./input.js";
import { renderFrame, viewportFor } from "./renderer.js";
import { initialViewState } from "./view_state.js";

function element<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing #${id}`);
  return el as T;
}

const canvas = element<HTMLCanvasElement>("view");
const ctx = canvas.getContext("2d");
if (ctx === null) throw new Error("2d canvas unavailable");

const altitude = element<HTMLInputElement>("altitude");
const altitudeLabel = element<HTMLSpanElement>("altitude-label");
const filterToggle = element<HTMLInputElement>("filter-toggle");
const resetButton = element<HTMLButtonElement>("reset");

const state = initialViewState();
const wsUrl = `ws://${location.host}/ws`;
const client = new ServiceClient(wsUrl, state, onScene);
const input = new ReferenceInput((m) => client.send(m), 6, Number(altitude.value));

function onScene(): void {
  const scene = state.scene;
  if (scene === null) return;
  input.setTickRate(scene.tick_hz);
  altitude.min = String(scene.map.origin[2]);
  altitude.max = String(scene.map.origin[2] + scene.map.extent[2]);
  altitude.step = String(scene.map.resolution);
  altitude.value = String(scene.start[2]);
  input.setAltitude(scene.start[2]);
  altitudeLabel.textContent = `${scene.start[2].toFixed(2)} m`;
}

// slice pixels are cached per generation and redrawn scaled every frame
let sliceCanvas: HTMLCanvasElement | null = null;
let sliceGenerationDrawn = -1;

function sliceBitmap(): HTMLCanvasElement | null {
  const slice = state.slice;
  if (slice === null) return null;
  if (state.sliceGeneration !== sliceGenerationDrawn) {
    const off = document.createElement("canvas");
    off.width = slice.width;
    off.height = slice.height;
    const offCtx = off.getContext("2d");
    if (offCtx === null) return sliceCanvas;
    const image = new ImageData(sliceToRgba(slice), slice.width, slice.height);
    offCtx.putImageData(image, 0, 0);
    sliceCanvas = off;
    sliceGenerationDrawn = state.sliceGeneration;
  }
  return sliceCanvas;
}

canvas.addEventListener("click", (event) => {
  const rect = canvas.getBoundingClientRect();
  const px = ((event.clientX - rect.left) / rect.width) * canvas.width;
  const py = ((event.clientY - rect.top) / rect.height) * canvas.height;
  const viewport = viewportFor(state, canvas.width, canvas.height);
  if (viewport === null || !viewport.contains(px, py)) return;
  const [wx, wy] = viewport.canvasToWorld(px, py);
  input.clickAt(wx, wy);
});

const ARROWS: Record<string, [number, number]> = {
  ArrowUp: [0, 1],
  ArrowDown: [0, -1],
  ArrowLeft: [-1, 0],
  ArrowRight: [1, 0],
};

window.addEventListener("keydown", (event) => {
  const delta = ARROWS[event.key];
  if (delta === undefined) return;
  event.preventDefault();
  const fallback = state.telemetry?.pose ?? state.scene?.start ?? [0, 0, 1];
  input.nudge(delta[0], delta[1], fallback);
});

altitude.addEventListener("input", () => {
  const z = Number(altitude.value);
  input.setAltitude(z);
  altitudeLabel.textContent = `${z.toFixed(2)} m`;
});

filterToggle.addEventListener("change", () => {
  client.send({ type: "toggle_filter", enabled: filterToggle.checked });
});

resetButton.addEventListener("click", () => {
  client.send({ type: "reset" });
});

function frame(now: number): void {
  if (input.flush(now, client.connected)) {
    state.droppedInput = true;
  } else if (client.connected) {
    state.droppedInput = false;
  }
  ctx!.imageSmoothingEnabled = false;
  renderFrame(ctx!, state, {
    width: canvas.width,
    height: canvas.height,
    sliceBitmap: sliceBitmap(),
    now,
  });
  requestAnimationFrame(frame);
}

client.connect();
requestAnimationFrame(frame);
