// World <-> canvas mapping for the top-down slice view.
//
// Slice rows iterate the row axis ascending, but the screen draws row 0 at
// the top, so the vertical axis is flipped: larger row-axis coordinates
// appear higher on the canvas. The transform letterboxes the slice into
// the canvas, preserving aspect ratio.

export interface SliceLayout {
  origin: [number, number];
  resolution: number;
  width: number;
  height: number;
}

export class Viewport {
  readonly scale: number;
  readonly offsetX: number;
  readonly offsetY: number;

  constructor(
    readonly layout: SliceLayout,
    readonly canvasWidth: number,
    readonly canvasHeight: number,
  ) {
    const worldW = layout.width * layout.resolution;
    const worldH = layout.height * layout.resolution;
    this.scale = Math.min(canvasWidth / worldW, canvasHeight / worldH);
    this.offsetX = (canvasWidth - worldW * this.scale) / 2;
    this.offsetY = (canvasHeight - worldH * this.scale) / 2;
  }

  // cell (0, 0) corner sits at the slice origin
  worldToCanvas(cx: number, ry: number): [number, number] {
    const [ox, oy] = this.layout.origin;
    const px = this.offsetX + (cx - ox) * this.scale;
    const worldH = this.layout.height * this.layout.resolution;
    const py = this.offsetY + (worldH - (ry - oy)) * this.scale;
    return [px, py];
  }

  canvasToWorld(px: number, py: number): [number, number] {
    const [ox, oy] = this.layout.origin;
    const cx = ox + (px - this.offsetX) / this.scale;
    const worldH = this.layout.height * this.layout.resolution;
    const ry = oy + worldH - (py - this.offsetY) / this.scale;
    return [cx, ry];
  }

  contains(px: number, py: number): boolean {
    const [cx, ry] = this.canvasToWorld(px, py);
    const [ox, oy] = this.layout.origin;
    return (
      cx >= ox &&
      cx <= ox + this.layout.width * this.layout.resolution &&
      ry >= oy &&
      ry <= oy + this.layout.height * this.layout.resolution
    );
  }

  // rectangle the slice bitmap should be drawn into
  imageRect(): [number, number, number, number] {
    return [
      this.offsetX,
      this.offsetY,
      this.layout.width * this.layout.resolution * this.scale,
      this.layout.height * this.layout.resolution * this.scale,
    ];
  }
}
