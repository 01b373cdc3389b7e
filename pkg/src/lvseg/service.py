"""Local HTTP facade for interactive review and anchor correction.

In-memory sessions over clip directories: serve frames as PNG, run the
pipeline as a background job (one per session), accept anchor corrections,
and return segmentation results. Intended for localhost review only.
"""

from __future__ import annotations

import io
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from .errors import LvSegError, StageError
from .imgcore import GrayClip, load_clip, quantize
from .pipeline import PipelineConfig, SegmentationResult, segment_clip


class CreateSessionBody(BaseModel):
    clip_dir: str


class PatchAnchorsBody(BaseModel):
    frame: int = 0
    septal: tuple[float, float] | None = None
    lateral: tuple[float, float] | None = None
    apex: tuple[float, float] | None = None


@dataclass
class Session:
    session_id: str
    clip: GrayClip
    config: PipelineConfig
    result: SegmentationResult | None = None
    status: str = "idle"  # idle | running | done | failed
    failed_stage: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    thread: threading.Thread | None = None


def _frame_png(clip: GrayClip, k: int) -> bytes:
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(quantize(clip.frames[k]), mode="L").save(buf, format="PNG")
    return buf.getvalue()


def create_app(clip_root: str | Path = ".") -> FastAPI:
    app = FastAPI(title="lvseg review service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    root = Path(clip_root)
    sessions: dict[str, Session] = {}

    def get_session(session_id: str) -> Session:
        s = sessions.get(session_id)
        if s is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return s

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        clip_dir = Path(body.clip_dir)
        if not clip_dir.is_absolute():
            clip_dir = root / clip_dir
        try:
            clip = load_clip(clip_dir)
        except (FileNotFoundError, KeyError, ValueError) as e:
            raise HTTPException(status_code=422, detail=f"cannot load clip: {e}")
        sid = uuid.uuid4().hex
        sessions[sid] = Session(sid, clip, PipelineConfig())
        return {"session_id": sid, "n_frames": clip.n_frames,
                "width": clip.frames[0].width, "height": clip.frames[0].height}

    @app.get("/sessions/{session_id}/frames/{k}")
    def get_frame(session_id: str, k: int):
        s = get_session(session_id)
        if not 0 <= k < s.clip.n_frames:
            raise HTTPException(status_code=404, detail="frame index out of range")
        return Response(content=_frame_png(s.clip, k), media_type="image/png")

    @app.get("/sessions/{session_id}/result")
    def get_result(session_id: str):
        s = get_session(session_id)
        with s.lock:
            if s.result is None:
                raise HTTPException(status_code=404, detail="no result yet")
            return JSONResponse(s.result.to_dict())

    @app.get("/sessions/{session_id}/status")
    def get_status(session_id: str):
        s = get_session(session_id)
        with s.lock:
            body = {"status": s.status}
            if s.failed_stage:
                body["failed_stage"] = s.failed_stage
            return body

    @app.patch("/sessions/{session_id}/anchors")
    def patch_anchors(session_id: str, body: PatchAnchorsBody):
        s = get_session(session_id)
        w = s.clip.frames[0].width
        h = s.clip.frames[0].height
        updates = {}
        for name in ("septal", "lateral", "apex"):
            pt = getattr(body, name)
            if pt is None:
                continue
            x, y = pt
            if not (0 <= x < w and 0 <= y < h):
                raise HTTPException(
                    status_code=422, detail=f"{name} anchor outside frame bounds"
                )
            updates[name] = [float(x), float(y)]
        with s.lock:
            if s.status == "running":
                raise HTTPException(status_code=409, detail="job already running")
            s.config.anchor_frame = body.frame
            s.config.overrides.update(updates)
            return {"overrides": s.config.overrides, "frame": s.config.anchor_frame}

    @app.post("/sessions/{session_id}/segment")
    def start_segment(session_id: str):
        s = get_session(session_id)
        with s.lock:
            if s.status == "running":
                raise HTTPException(status_code=409, detail="job already running")
            s.status = "running"
            s.failed_stage = None
            cfg = PipelineConfig.from_params_dict(s.config.to_params_dict())

        def run():
            try:
                result = segment_clip(s.clip, cfg)
            except LvSegError as e:
                with s.lock:
                    s.status = "failed"
                    s.failed_stage = e.stage if isinstance(e, StageError) else type(e).__name__
                return
            with s.lock:
                s.result = result
                s.status = "done"

        t = threading.Thread(target=run, daemon=True)
        s.thread = t
        t.start()
        return {"job": session_id, "status": "running"}

    return app


app = create_app()
