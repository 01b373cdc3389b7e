"""Percent non-overlap error and the synthetic phantom generator.

The phantom is a half-ellipse cavity (dark) inside a bright myocardial
band, closed at the base by a bright valve bridge, with static body layers
above the epicardium and sinusoidal base motion plus cavity-area modulation
over one cycle. Multiplicative speckle decorrelates frame to frame inside
the moving region only, which is what the apex detector keys on. Ground
truth (anchors, analytic border, cavity area) ships with every clip.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .anatomy import AnchorSet
from .errors import DegenerateManual, FrameCountMismatch, SpecInfeasible
from .imgcore import Contour, GrayClip, GrayImage, PointF, rasterize_polygon


@dataclass
class PhantomSpec:
    width: int = 160
    height: int = 160
    n_frames: int = 12
    cavity_center_x: float = 80.0
    # half-integer base row keeps pixel-center rasterization unbiased there
    base_y: float = 112.5
    semi_axis_x: float = 34.0
    semi_axis_y: float = 62.0
    orientation: float = 0.0  # radians about the base center
    wall_thickness: float = 10.0
    wall_thickening: float = 0.3  # systolic wall-thickness modulation
    motion_amplitude: float = 6.0  # base excursion, px
    area_modulation: float = 0.15  # peak fractional cavity-area change
    valve_gap: float = 0.0  # px; 0 = closed valve bridge
    speckle_sigma: float = 6.0  # intensity std at mid gray
    seed: int = 0
    # gray levels
    cavity_level: float = 30.0
    wall_level: float = 200.0
    body_level: float = 100.0
    atrium_level: float = 40.0

    def __post_init__(self):
        if self.n_frames < 4:
            raise SpecInfeasible("n_frames must be >= 4")
        if self.speckle_sigma < 0:
            raise SpecInfeasible("speckle_sigma must be >= 0")
        a_max = self.semi_axis_x * (1 + abs(self.area_modulation)) + self.wall_thickness * (
            1 + abs(self.wall_thickening)
        )
        if (
            self.cavity_center_x - a_max < 2
            or self.cavity_center_x + a_max > self.width - 2
            or self.base_y
            - self.semi_axis_y
            - self.wall_thickness * (1 + abs(self.wall_thickening))
            < 2
            or self.base_y + self.motion_amplitude + 6 > self.height - 2
            or self.semi_axis_y - self.motion_amplitude < 4
        ):
            raise SpecInfeasible("cavity plus wall does not fit inside the frame")


@dataclass
class GroundTruth:
    anchors: list[AnchorSet]
    contours: list[Contour]
    areas: list[float]
    width: int = 0
    height: int = 0

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "frames": [
                {
                    "anchors": {
                        "septal": list(a.septal),
                        "lateral": list(a.lateral),
                        "apex": list(a.apex),
                    },
                    "contour": c.points.tolist(),
                    "area": area,
                }
                for a, c, area in zip(self.anchors, self.contours, self.areas)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GroundTruth":
        anchors, contours, areas = [], [], []
        for k, fr in enumerate(d["frames"]):
            a = fr["anchors"]
            anchors.append(
                AnchorSet(
                    septal=PointF(*a["septal"]),
                    lateral=PointF(*a["lateral"]),
                    apex=PointF(*a["apex"]),
                    frame_index=k,
                    provenance={p: "manual" for p in ("septal", "lateral", "apex")},
                )
            )
            contours.append(Contour(np.asarray(fr["contour"]), k, kind="manual"))
            areas.append(float(fr["area"]))
        return cls(anchors, contours, areas, int(d["width"]), int(d["height"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "GroundTruth":
        return cls.from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# Metric


def percent_error(
    auto: Contour,
    manual: Contour,
    width: int | None = None,
    height: int | None = None,
) -> float:
    """XOR area of the two chord-closed regions over the manual area.

    Both contours are closed by their septal -> lateral base segment and
    rasterized with the pixel-center even-odd rule.
    """
    if width is None or height is None:
        both = np.vstack([auto.points, manual.points])
        width = int(math.ceil(both[:, 0].max())) + 2
        height = int(math.ceil(both[:, 1].max())) + 2
    mask_a = rasterize_polygon(auto.points, width, height)
    mask_m = rasterize_polygon(manual.points, width, height)
    manual_area = int(mask_m.sum())
    if manual_area == 0:
        raise DegenerateManual("manual region rasterizes to zero area")
    return float((mask_a ^ mask_m).sum() / manual_area)


# ---------------------------------------------------------------------------
# Phantom generation


def _half_ellipse(
    cx: float, by: float, a: float, b: float, theta: float, n: int = 241
) -> np.ndarray:
    """Septal -> apex -> lateral sampling of the half ellipse above the base,
    rotated by theta about the base center (cx, by). n is odd so the apex
    (phi = pi/2) is sampled exactly."""
    phi = np.linspace(math.pi, 0.0, n)
    x = a * np.cos(phi)
    y = -b * np.sin(phi)
    c, s = math.cos(theta), math.sin(theta)
    xr = cx + c * x - s * y
    yr = by + s * x + c * y
    return np.stack([xr, yr], axis=1)


def generate_phantom(spec: PhantomSpec) -> tuple[GrayClip, GroundTruth]:
    """Deterministic synthetic clip plus per-frame ground truth."""
    rng = np.random.default_rng(spec.seed)
    w, h = spec.width, spec.height
    n = spec.n_frames
    phase = 2.0 * math.pi * np.arange(n) / n
    base_ys = spec.base_y + spec.motion_amplitude * np.sin(phase)
    # the apex is quasi-stationary: the base moves toward/away from it, so
    # the vertical semi-axis absorbs the base excursion while the cavity
    # area modulates through the horizontal semi-axis
    apex_y = spec.base_y - spec.semi_axis_y
    a_scales = 1.0 + spec.area_modulation * np.sin(phase)
    # systolic wall thickening moves the epicardial edge while the
    # endocardial apex stays put
    wall_ths = spec.wall_thickness * (1.0 + spec.wall_thickening * np.sin(phase))
    bridge_th = max(3, int(round(spec.wall_thickness / 2)))

    sigma_rel = spec.speckle_sigma / 128.0
    static_factor = (
        np.clip(1.0 + sigma_rel * rng.standard_normal((h, w)), 0.0, 2.0)
        if sigma_rel > 0
        else np.ones((h, w))
    )

    frames_raw = []
    anchors_list, contours, areas = [], [], []
    moving_union = np.zeros((h, w), dtype=bool)
    ys_grid = np.arange(h)[:, None]
    for k in range(n):
        by = float(base_ys[k])
        a = spec.semi_axis_x * float(a_scales[k])
        b = by - apex_y
        wt = float(wall_ths[k])
        endo = _half_ellipse(spec.cavity_center_x, by, a, b, spec.orientation)
        epi = _half_ellipse(
            spec.cavity_center_x,
            by,
            a + wt,
            b + wt,
            spec.orientation,
        )
        cavity = rasterize_polygon(endo, w, h)
        heart = rasterize_polygon(epi, w, h)

        img = np.full((h, w), spec.body_level)
        img[ys_grid.ravel() > by + bridge_th, :] = spec.atrium_level
        img[heart] = spec.wall_level
        # atrial walls: the myocardium continues below the base on both sides
        xs_grid = np.arange(w)[None, :]
        below = ys_grid > by
        for x_in, x_out in (
            (spec.cavity_center_x - a, spec.cavity_center_x - a - wt),
            (spec.cavity_center_x + a, spec.cavity_center_x + a + wt),
        ):
            lo, hi = sorted((x_in, x_out))
            img[below & (xs_grid >= lo) & (xs_grid <= hi)] = spec.wall_level
        img[cavity] = spec.cavity_level
        # valve bridge along the base chord
        septal = PointF(float(endo[0, 0]), float(endo[0, 1]))
        lateral = PointF(float(endo[-1, 0]), float(endo[-1, 1]))
        bx0 = int(round(septal.x))
        bx1 = int(round(lateral.x))
        yb0 = int(math.floor(by)) + 1  # first row strictly below the chord
        bridge = np.zeros((h, w), dtype=bool)
        bridge[yb0 : yb0 + bridge_th, bx0 : bx1 + 1] = True
        img[bridge] = spec.wall_level
        if spec.valve_gap > 0:
            gx0 = int(round(spec.cavity_center_x - spec.valve_gap / 2))
            gx1 = int(round(spec.cavity_center_x + spec.valve_gap / 2))
            img[yb0 : yb0 + bridge_th, gx0:gx1] = spec.cavity_level

        frames_raw.append(img)
        moving_union |= heart | bridge
        apex_idx = len(endo) // 2
        apex = PointF(float(endo[apex_idx, 0]), float(endo[apex_idx, 1]))
        anchors_list.append(
            AnchorSet(
                septal=septal,
                lateral=lateral,
                apex=apex,
                frame_index=k,
                provenance={p: "manual" for p in ("septal", "lateral", "apex")},
            )
        )
        contours.append(Contour(endo.copy(), k, kind="manual"))
        areas.append(float(cavity.sum()))

    # everything at or below the highest base position also moves
    moving_union |= ys_grid >= math.floor(base_ys.min())

    frames = []
    for img in frames_raw:
        if sigma_rel > 0:
            frame_factor = np.clip(
                1.0 + sigma_rel * rng.standard_normal((h, w)), 0.0, 2.0
            )
            factor = np.where(moving_union, frame_factor, static_factor)
            factor = ndimage.uniform_filter(factor, size=3, mode="nearest")
            img = img * factor
        frames.append(GrayImage(np.clip(img, 0.0, 255.0)))

    clip = GrayClip(
        frames=frames,
        frame_rate=30.0,
        pixel_spacing=1.0,
        clip_id=f"phantom_seed{spec.seed}",
    )
    gt = GroundTruth(anchors_list, contours, areas, width=w, height=h)
    return clip, gt


# ---------------------------------------------------------------------------
# Clip-level report


def evaluate_clip(auto, gt: GroundTruth) -> dict:
    """Per-frame percent errors plus anchor distances against ground truth.

    ``auto`` is a pipeline SegmentationResult; the headline mean/std follow
    the final (refined where available) contours.
    """
    if len(auto.frames) != len(gt.contours):
        raise FrameCountMismatch(
            f"{len(auto.frames)} result frames vs {len(gt.contours)} truth frames"
        )
    w, hh = gt.width, gt.height
    initial_err, final_err, anchor_err = [], [], []
    for fr, manual, a_gt in zip(auto.frames, gt.contours, gt.anchors):
        e_init = percent_error(fr.initial, manual, w, hh)
        contour = fr.refined if fr.refined is not None else fr.initial
        initial_err.append(e_init)
        final_err.append(percent_error(contour, manual, w, hh))
        anchor_err.append(
            {
                "septal": float(np.hypot(*(np.array(fr.anchors.septal) - a_gt.septal))),
                "lateral": float(
                    np.hypot(*(np.array(fr.anchors.lateral) - a_gt.lateral))
                ),
                "apex": float(np.hypot(*(np.array(fr.anchors.apex) - a_gt.apex))),
            }
        )
    final = np.asarray(final_err)
    init = np.asarray(initial_err)
    return {
        "mean_pct_error": float(final.mean()),
        "std_pct_error": float(final.std()),
        "initial_mean_pct_error": float(init.mean()),
        "initial_std_pct_error": float(init.std()),
        "per_frame": final_err,
        "per_frame_initial": initial_err,
        "anchor_errors": anchor_err,
    }


def write_report(report: dict, json_path: str | Path, csv_path: str | Path | None = None) -> None:
    Path(json_path).write_text(json.dumps(report, indent=2) + "\n")
    if csv_path is not None:
        lines = ["frame,pct_error,septal_err,lateral_err,apex_err"]
        for k, (e, a) in enumerate(zip(report["per_frame"], report["anchor_errors"])):
            lines.append(
                f"{k},{e:.6f},{a['septal']:.3f},{a['lateral']:.3f},{a['apex']:.3f}"
            )
        Path(csv_path).write_text("\n".join(lines) + "\n")
