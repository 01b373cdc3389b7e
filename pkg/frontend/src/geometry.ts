// Image <-> screen coordinate transforms and anchor hit testing.
// Overlays must sit exactly on the JSON coordinates at integer zoom, so the
// transform is a pure scale with no sub-pixel offsets.

import type { Point } from "./api.js";

export const ANCHOR_HIT_RADIUS_PX = 8; // screen px, usable on speckle

export interface Transform {
  scale: number;
}

export function imageToScreen(p: Point, t: Transform): Point {
  return [p[0] * t.scale, p[1] * t.scale];
}

export function screenToImage(p: Point, t: Transform): Point {
  return [p[0] / t.scale, p[1] / t.scale];
}

export function distance(a: Point, b: Point): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1]);
}

export type AnchorName = "septal" | "lateral" | "apex";

/** Nearest anchor within the hit radius of a screen position, if any. */
export function hitTestAnchors(
  screenPos: Point,
  anchors: Record<AnchorName, Point>,
  t: Transform,
): AnchorName | null {
  let best: AnchorName | null = null;
  let bestDist = ANCHOR_HIT_RADIUS_PX;
  for (const name of ["septal", "lateral", "apex"] as AnchorName[]) {
    const d = distance(screenPos, imageToScreen(anchors[name], t));
    if (d <= bestDist) {
      best = name;
      bestDist = d;
    }
  }
  return best;
}

export function inBounds(p: Point, width: number, height: number): boolean {
  return p[0] >= 0 && p[0] < width && p[1] >= 0 && p[1] < height;
}

/** Clamp an image-space point to the frame (used for drag previews only;
 * out-of-bounds drops are rejected, not clamped). */
export function clampToFrame(p: Point, width: number, height: number): Point {
  return [
    Math.min(Math.max(p[0], 0), width - 1),
    Math.min(Math.max(p[1], 0), height - 1),
  ];
}
