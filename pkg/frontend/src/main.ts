// DOM wiring: session loading, frame playback, anchor dragging, job
// polling. Rendering always happens from ViewState + service JSON.

import { ApiError, LvsegApi } from "./api.js";
import {
  hitTestAnchors,
  inBounds,
  screenToImage,
  type AnchorName,
  type Transform,
} from "./geometry.js";
import { drawFrameOverlays } from "./overlay.js";
import {
  applyResult,
  applyStatus,
  displayedAnchors,
  endDrag,
  initialState,
  moveDrag,
  startDrag,
  stepFrame,
  type ViewState,
} from "./state.js";

const POLL_INTERVAL_MS = 500;
const ZOOM = 3; // integer zoom keeps overlays pixel-exact

const $ = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

const api = new LvsegApi(
  (window as unknown as { LVSEG_API?: string }).LVSEG_API ?? "http://127.0.0.1:8000",
);

let state: ViewState = initialState();
let frameImage: HTMLImageElement | null = null;
let pollTimer: number | null = null;

function setState(next: ViewState): void {
  state = next;
  render();
}

function banner(msg: string | null): void {
  setState({ ...state, banner: msg });
}

async function loadSession(): Promise<void> {
  const clipDir = ($("clip-dir") as HTMLInputElement).value.trim();
  if (!clipDir) return banner("enter a clip directory");
  try {
    const info = await api.createSession(clipDir);
    setState({
      ...initialState(),
      sessionId: info.session_id,
      nFrames: info.n_frames,
      width: info.width,
      height: info.height,
    });
    await showFrame(0);
  } catch (e) {
    banner(e instanceof ApiError ? e.message : String(e));
  }
}

async function showFrame(k: number): Promise<void> {
  if (state.sessionId === null) return;
  const img = new Image();
  img.src = api.frameUrl(state.sessionId, k);
  await img.decode().catch(() => banner("failed to load frame image"));
  frameImage = img;
  setState({ ...state, frameIndex: k });
}

function transform(): Transform {
  return { scale: ZOOM };
}

function render(): void {
  const canvas = $("view") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  canvas.width = state.width * ZOOM;
  canvas.height = state.height * ZOOM;
  ctx.imageSmoothingEnabled = false;
  if (frameImage !== null) {
    ctx.drawImage(frameImage, 0, 0, canvas.width, canvas.height);
  }
  const fr = state.result?.frames[state.frameIndex];
  if (fr) {
    drawFrameOverlays(ctx, fr, transform(), {
      anchors: state.overlays.anchors,
      initial: state.overlays.initial,
      refined: state.overlays.refined,
      dragAnchor: state.drag?.anchor ?? null,
      dragPos: state.drag?.livePos ?? null,
    });
  }

  $("frame-label").textContent = `frame ${state.frameIndex + 1} / ${state.nFrames}`;
  $("status-label").textContent =
    state.jobStatus + (state.failedStage ? ` (${state.failedStage})` : "");
  $("stale-label").style.display = state.staleResult ? "inline" : "none";
  const bannerEl = $("banner");
  bannerEl.textContent = state.banner ?? "";
  bannerEl.style.display = state.banner ? "block" : "none";
  ($("segment-btn") as HTMLButtonElement).disabled =
    state.sessionId === null || state.jobStatus === "running";
  const prov = fr?.anchors.provenance ?? {};
  $("provenance-label").textContent = fr
    ? `septal ${prov["septal"]}, lateral ${prov["lateral"]}, apex ${prov["apex"]}`
    : "";
}

function canvasPos(ev: MouseEvent): [number, number] {
  const canvas = $("view") as HTMLCanvasElement;
  const rect = canvas.getBoundingClientRect();
  return [ev.clientX - rect.left, ev.clientY - rect.top];
}

function onMouseDown(ev: MouseEvent): void {
  const anchors = displayedAnchors(state);
  if (anchors === null) return;
  const hit: AnchorName | null = hitTestAnchors(canvasPos(ev), anchors, transform());
  if (hit !== null) {
    setState(startDrag(state, hit, anchors[hit]));
  }
}

function onMouseMove(ev: MouseEvent): void {
  if (state.drag === null) return;
  setState(moveDrag(state, screenToImage(canvasPos(ev), transform())));
}

async function onMouseUp(): Promise<void> {
  const { state: next, drop } = endDrag(state);
  setState(next);
  if (drop === null || state.sessionId === null) return;
  if (!inBounds(drop.pos, state.width, state.height)) return;
  try {
    await api.patchAnchor(state.sessionId, 0, drop.anchor, drop.pos);
    banner(null);
  } catch (e) {
    // 422 or conflict: revert visually by refetching nothing; the result
    // JSON still holds the previous anchors
    setState({ ...state, staleResult: false });
    banner(e instanceof ApiError ? e.message : String(e));
  }
}

async function segment(): Promise<void> {
  if (state.sessionId === null) return;
  try {
    await api.startSegment(state.sessionId);
    setState(applyStatus(state, "running"));
    poll();
  } catch (e) {
    banner(e instanceof ApiError ? e.message : String(e));
  }
}

function poll(): void {
  if (pollTimer !== null) window.clearTimeout(pollTimer);
  pollTimer = window.setTimeout(async () => {
    if (state.sessionId === null) return;
    try {
      const st = await api.getStatus(state.sessionId);
      setState(applyStatus(state, st.status, st.failed_stage));
      if (st.status === "running") return poll();
      if (st.status === "done") {
        const result = await api.getResult(state.sessionId);
        setState(applyResult(state, result));
      } else if (st.status === "failed") {
        banner(`segmentation failed at stage ${st.failed_stage ?? "unknown"}`);
      }
    } catch (e) {
      banner(e instanceof ApiError ? e.message : String(e));
    }
  }, POLL_INTERVAL_MS);
}

function wire(): void {
  $("load-btn").addEventListener("click", () => void loadSession());
  $("segment-btn").addEventListener("click", () => void segment());
  $("prev-btn").addEventListener("click", () => {
    setState(stepFrame(state, -1));
    void showFrame(state.frameIndex);
  });
  $("next-btn").addEventListener("click", () => {
    setState(stepFrame(state, +1));
    void showFrame(state.frameIndex);
  });
  for (const name of ["anchors", "initial", "refined"] as const) {
    $(`toggle-${name}`).addEventListener("change", (ev) => {
      const checked = (ev.target as HTMLInputElement).checked;
      setState({ ...state, overlays: { ...state.overlays, [name]: checked } });
    });
  }
  const canvas = $("view");
  canvas.addEventListener("mousedown", onMouseDown);
  canvas.addEventListener("mousemove", onMouseMove);
  canvas.addEventListener("mouseup", () => void onMouseUp());
  canvas.addEventListener("mouseleave", () => void onMouseUp());
  render();
}

document.addEventListener("DOMContentLoaded", wire);
