/** Canvas rendering of grayscale depth-strip frames, plus the pan dial. */

import type { VideoFrame } from "./codec.js";

export function drawFrame(canvas: HTMLCanvasElement, frame: VideoFrame): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  if (canvas.width !== frame.width || canvas.height !== frame.height) {
    canvas.width = frame.width;
    canvas.height = frame.height;
  }
  const image = ctx.createImageData(frame.width, frame.height);
  const rgba = image.data;
  for (let i = 0; i < frame.pixels.length; i++) {
    const v = frame.pixels[i];
    const o = i * 4;
    rgba[o] = v;
    rgba[o + 1] = v;
    rgba[o + 2] = v;
    rgba[o + 3] = 255;
  }
  ctx.putImageData(image, 0, 0);
}

export function overlayText(canvas: HTMLCanvasElement, frame: VideoFrame): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.font = "8px monospace";
  ctx.fillStyle = "#7CFC00";
  ctx.fillText(`pan ${frame.pan} tick ${frame.tick}`, 3, 10);
}

/**
 * Pan dial: horizontal dragging accumulates whole degrees and reports them
 * as deltas for CmdCamera messages.
 */
export class PanDial {
  public readonly degreesPerPixel: number;
  private pending = 0;

  constructor(degreesPerPixel = 0.5) {
    this.degreesPerPixel = degreesPerPixel;
  }

  drag(pixels: number): number {
    this.pending += pixels * this.degreesPerPixel;
    const whole = Math.trunc(this.pending);
    this.pending -= whole;
    return whole;
  }
}
