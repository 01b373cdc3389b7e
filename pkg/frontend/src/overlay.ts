// Canvas overlay rendering. Drawing goes through the minimal Ctx2D
// interface so tests can record the exact coordinates drawn and compare
// them against the JSON values.

import type { FrameResultJson, Point } from "./api.js";
import { imageToScreen, type AnchorName, type Transform } from "./geometry.js";

export interface Ctx2D {
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
}

export const COLORS = {
  initial: "#ffd600",
  refined: "#00dc50",
  auto: "#ff5050",
  corrected: "#00b0ff",
  apex: "#ff00ff",
  drag: "#ffffff",
};

export const MARKER_RADIUS = 5;

export function drawPolyline(ctx: Ctx2D, points: Point[], t: Transform, color: string): void {
  if (points.length < 2) return;
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  const [x0, y0] = imageToScreen(points[0], t);
  ctx.moveTo(x0, y0);
  for (let i = 1; i < points.length; i++) {
    const [x, y] = imageToScreen(points[i], t);
    ctx.lineTo(x, y);
  }
  ctx.stroke();
}

export function drawAnchorMarker(
  ctx: Ctx2D,
  imagePos: Point,
  t: Transform,
  color: string,
): void {
  const [cx, cy] = imageToScreen(imagePos, t);
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(cx, cy, MARKER_RADIUS, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.beginPath();
  ctx.moveTo(cx - MARKER_RADIUS - 3, cy);
  ctx.lineTo(cx + MARKER_RADIUS + 3, cy);
  ctx.moveTo(cx, cy - MARKER_RADIUS - 3);
  ctx.lineTo(cx, cy + MARKER_RADIUS + 3);
  ctx.stroke();
}

export interface OverlayOptions {
  anchors: boolean;
  initial: boolean;
  refined: boolean;
  dragAnchor: AnchorName | null;
  dragPos: Point | null;
}

export function drawFrameOverlays(
  ctx: Ctx2D,
  frame: FrameResultJson,
  t: Transform,
  opts: OverlayOptions,
): void {
  if (opts.initial) drawPolyline(ctx, frame.initial, t, COLORS.initial);
  if (opts.refined && frame.refined !== null) {
    drawPolyline(ctx, frame.refined, t, COLORS.refined);
  }
  if (!opts.anchors) return;
  const names: AnchorName[] = ["septal", "lateral", "apex"];
  for (const name of names) {
    if (opts.dragAnchor === name && opts.dragPos !== null) {
      drawAnchorMarker(ctx, opts.dragPos, t, COLORS.drag);
      continue;
    }
    const prov = frame.anchors.provenance[name] ?? "auto";
    const color = prov === "corrected" ? COLORS.corrected : COLORS.auto;
    drawAnchorMarker(ctx, frame.anchors[name], t, color);
  }
}
