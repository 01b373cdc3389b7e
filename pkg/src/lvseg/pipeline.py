"""Orchestration of the five segmentation steps, configuration and results.

segment_clip runs: valve-corner detection (Step 1) and apex detection
(Step 2) on the anchor frame — either may be bypassed by manual overrides —
then corner tracking (Step 3), per-frame DP initial contours (Step 4) and
active-contour refinement (Step 5). Everything is deterministic; the result
carries a fingerprint of the full parameter set.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .anatomy import AnchorSet, ApexDetectParams, ValveDetectParams, detect_apex, detect_valve
from .dpcontour import DpParams, initial_contour
from .errors import LvSegError, StageError
from .imgcore import Contour, GrayClip, PointF
from .snake import SnakeParams, evolve
from .tracking import TrackParams, track_corners

RESULT_VERSION = "1"


@dataclass
class PipelineConfig:
    valve: ValveDetectParams = field(default_factory=ValveDetectParams)
    apex: ApexDetectParams = field(default_factory=ApexDetectParams)
    tracking: TrackParams = field(default_factory=TrackParams)
    dp: DpParams = field(default_factory=DpParams)
    snake: SnakeParams = field(default_factory=SnakeParams)
    margin: int = 10
    smooth_window: int = 5
    smooth_radius: int = 2
    anchor_frame: int = 0
    run_snake: bool = True
    # optional manual anchors for the anchor frame: {"septal": [x, y], ...}
    overrides: dict = field(default_factory=dict)

    def to_params_dict(self) -> dict:
        valve = asdict(self.valve)
        apex = asdict(self.apex)
        tracking = asdict(self.tracking)
        tracking["big_size"] = list(tracking["big_size"])
        tracking["small_size"] = list(tracking["small_size"])
        tracking["small_offset"] = list(tracking["small_offset"])
        return {
            "anatomy": {**valve, **apex},
            "tracking": tracking,
            "dp": {
                **asdict(self.dp),
                "margin": self.margin,
                "smooth_window": self.smooth_window,
                "smooth_radius": self.smooth_radius,
            },
            "snake": asdict(self.snake),
            "pipeline": {
                "anchor_frame": self.anchor_frame,
                "run_snake": self.run_snake,
                "overrides": self.overrides,
            },
        }

    @classmethod
    def from_params_dict(cls, d: dict) -> "PipelineConfig":
        cfg = cls()
        anatomy = d.get("anatomy", {})
        valve_fields = {f for f in ValveDetectParams.__dataclass_fields__}
        apex_fields = {f for f in ApexDetectParams.__dataclass_fields__}
        cfg.valve = ValveDetectParams(
            **{k: v for k, v in anatomy.items() if k in valve_fields}
        )
        cfg.apex = ApexDetectParams(
            **{k: v for k, v in anatomy.items() if k in apex_fields}
        )
        tr = dict(d.get("tracking", {}))
        for key in ("big_size", "small_size", "small_offset"):
            if key in tr:
                tr[key] = tuple(tr[key])
        cfg.tracking = TrackParams(**tr)
        dp = dict(d.get("dp", {}))
        cfg.margin = int(dp.pop("margin", cfg.margin))
        cfg.smooth_window = int(dp.pop("smooth_window", cfg.smooth_window))
        cfg.smooth_radius = int(dp.pop("smooth_radius", cfg.smooth_radius))
        cfg.dp = DpParams(**dp)
        cfg.snake = SnakeParams(**d.get("snake", {}))
        pl = d.get("pipeline", {})
        cfg.anchor_frame = int(pl.get("anchor_frame", 0))
        cfg.run_snake = bool(pl.get("run_snake", True))
        cfg.overrides = dict(pl.get("overrides", {}))
        return cfg

    def fingerprint(self) -> str:
        canon = json.dumps(self.to_params_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_params_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        return cls.from_params_dict(json.loads(Path(path).read_text()))


@dataclass
class FrameResult:
    index: int
    anchors: AnchorSet
    initial: Contour
    refined: Contour | None
    snake_failed: bool = False


@dataclass
class SegmentationResult:
    clip_id: str
    params_fingerprint: str
    frames: list[FrameResult]
    version: str = RESULT_VERSION

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "clip_id": self.clip_id,
            "params_fingerprint": self.params_fingerprint,
            "frames": [
                {
                    "index": fr.index,
                    "anchors": {
                        "septal": list(fr.anchors.septal),
                        "lateral": list(fr.anchors.lateral),
                        "apex": list(fr.anchors.apex),
                        "provenance": dict(fr.anchors.provenance),
                    },
                    "initial": fr.initial.points.tolist(),
                    "refined": None
                    if fr.refined is None
                    else fr.refined.points.tolist(),
                    "snake_failed": fr.snake_failed,
                }
                for fr in self.frames
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SegmentationResult":
        import numpy as np

        frames = []
        for fr in d["frames"]:
            k = int(fr["index"])
            a = fr["anchors"]
            anchors = AnchorSet(
                septal=PointF(*a["septal"]),
                lateral=PointF(*a["lateral"]),
                apex=PointF(*a["apex"]),
                frame_index=k,
                provenance=dict(a.get("provenance", {})),
            )
            initial = Contour(np.asarray(fr["initial"]), k, kind="initial")
            refined = (
                None
                if fr.get("refined") is None
                else Contour(np.asarray(fr["refined"]), k, kind="refined")
            )
            frames.append(
                FrameResult(k, anchors, initial, refined, bool(fr.get("snake_failed")))
            )
        return cls(
            clip_id=str(d["clip_id"]),
            params_fingerprint=str(d["params_fingerprint"]),
            frames=frames,
            version=str(d.get("version", RESULT_VERSION)),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "SegmentationResult":
        return cls.from_dict(json.loads(Path(path).read_text()))


def detect_anchors(clip: GrayClip, cfg: PipelineConfig) -> AnchorSet:
    """Steps 1 and 2 on the anchor frame, honoring manual overrides."""
    k = cfg.anchor_frame
    frame = clip.frames[k]
    ov = cfg.overrides
    provenance = {}
    if "septal" in ov and "lateral" in ov:
        septal = PointF(*ov["septal"])
        lateral = PointF(*ov["lateral"])
        provenance["septal"] = provenance["lateral"] = "corrected"
    else:
        try:
            septal, lateral = detect_valve(frame, cfg.valve)
        except LvSegError as e:
            raise StageError("valve_detection", k, e) from e
        provenance["septal"] = provenance["lateral"] = "auto"
        if "septal" in ov:
            septal = PointF(*ov["septal"])
            provenance["septal"] = "corrected"
        if "lateral" in ov:
            lateral = PointF(*ov["lateral"])
            provenance["lateral"] = "corrected"
    if "apex" in ov:
        apex = PointF(*ov["apex"])
        provenance["apex"] = "corrected"
    else:
        try:
            apex, _epi = detect_apex(clip, k, septal, lateral, cfg.apex)
        except LvSegError as e:
            raise StageError("apex_detection", k, e) from e
        provenance["apex"] = "auto"
    return AnchorSet(septal, lateral, apex, k, provenance)


def segment_clip(clip: GrayClip, cfg: PipelineConfig) -> SegmentationResult:
    """Run the full pipeline on one clip."""
    anchors0 = detect_anchors(clip, cfg)
    try:
        trajectory = track_corners(clip, anchors0, cfg.tracking)
    except LvSegError as e:
        raise StageError("tracking", getattr(e, "frame_index", None), e) from e

    frames: list[FrameResult] = []
    for k, (septal, lateral) in enumerate(trajectory):
        prov = dict(anchors0.provenance) if k == cfg.anchor_frame else {
            "septal": "auto",
            "lateral": "auto",
            "apex": anchors0.provenance.get("apex", "auto"),
        }
        anchors = AnchorSet(septal, lateral, anchors0.apex, k, prov)
        try:
            init = initial_contour(
                clip.frames[k],
                anchors,
                cfg.dp,
                smooth_window=cfg.smooth_window,
                margin=cfg.margin,
                smooth_radius=cfg.smooth_radius,
            )
        except LvSegError as e:
            raise StageError("dp_contour", k, e) from e
        refined = None
        snake_failed = False
        if cfg.run_snake:
            try:
                refined = evolve(clip.frames[k], init, anchors, cfg.snake)
            except LvSegError:
                # refinement is fine tuning; keep the initial contour
                snake_failed = True
        frames.append(FrameResult(k, anchors, init, refined, snake_failed))
    return SegmentationResult(
        clip_id=clip.clip_id,
        params_fingerprint=cfg.fingerprint(),
        frames=frames,
    )
