// View state and its pure transitions. The DOM layer dispatches events into
// these functions and re-renders from the returned state; no segmentation
// math happens here.

import type { Point, SegmentationJson } from "./api.js";
import type { AnchorName } from "./geometry.js";

export interface DragState {
  anchor: AnchorName;
  livePos: Point; // image coordinates
}

export interface ViewState {
  sessionId: string | null;
  nFrames: number;
  width: number;
  height: number;
  frameIndex: number;
  overlays: { anchors: boolean; initial: boolean; refined: boolean };
  drag: DragState | null;
  jobStatus: "idle" | "running" | "done" | "failed";
  failedStage: string | null;
  result: SegmentationJson | null;
  /** anchors were corrected after the shown result was produced */
  staleResult: boolean;
  banner: string | null;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    nFrames: 0,
    width: 0,
    height: 0,
    frameIndex: 0,
    overlays: { anchors: true, initial: true, refined: true },
    drag: null,
    jobStatus: "idle",
    failedStage: null,
    result: null,
    staleResult: false,
    banner: null,
  };
}

export function clampFrameIndex(s: ViewState, k: number): number {
  if (s.nFrames <= 0) return 0;
  return Math.min(Math.max(k, 0), s.nFrames - 1);
}

export function stepFrame(s: ViewState, delta: number): ViewState {
  return { ...s, frameIndex: clampFrameIndex(s, s.frameIndex + delta) };
}

export function startDrag(s: ViewState, anchor: AnchorName, pos: Point): ViewState {
  if (s.drag !== null) return s; // at most one active drag
  if (s.jobStatus === "running") return s;
  return { ...s, drag: { anchor, livePos: pos } };
}

export function moveDrag(s: ViewState, pos: Point): ViewState {
  if (s.drag === null) return s;
  return { ...s, drag: { ...s.drag, livePos: pos } };
}

/** Drag ended; the caller PATCHes the anchor. Returns the cleared state and
 * the drop position, or null when the drop is out of frame (revert). */
export function endDrag(s: ViewState): { state: ViewState; drop: { anchor: AnchorName; pos: Point } | null } {
  if (s.drag === null) return { state: s, drop: null };
  const { anchor, livePos } = s.drag;
  const cleared = { ...s, drag: null };
  const inside =
    livePos[0] >= 0 && livePos[0] < s.width && livePos[1] >= 0 && livePos[1] < s.height;
  if (!inside) {
    return {
      state: { ...cleared, banner: "anchor dropped outside the frame; reverted" },
      drop: null,
    };
  }
  return { state: { ...cleared, staleResult: s.result !== null }, drop: { anchor, pos: livePos } };
}

export function applyStatus(
  s: ViewState,
  status: "idle" | "running" | "done" | "failed",
  failedStage?: string,
): ViewState {
  return {
    ...s,
    jobStatus: status,
    failedStage: status === "failed" ? (failedStage ?? "unknown") : null,
  };
}

export function applyResult(s: ViewState, result: SegmentationJson): ViewState {
  return { ...s, result, staleResult: false, banner: null };
}

/** Anchors for the shown frame, preferring a live drag preview. */
export function displayedAnchors(s: ViewState): Record<AnchorName, Point> | null {
  if (s.result === null) return null;
  const fr = s.result.frames[s.frameIndex];
  if (!fr) return null;
  const anchors: Record<AnchorName, Point> = {
    septal: fr.anchors.septal,
    lateral: fr.anchors.lateral,
    apex: fr.anchors.apex,
  };
  if (s.drag !== null) anchors[s.drag.anchor] = s.drag.livePos;
  return anchors;
}
