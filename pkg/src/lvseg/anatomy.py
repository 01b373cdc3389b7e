"""Automatic anatomical-marker detection: mitral-valve corners and apex.

Valve corners are found in one systolic frame via bright valve pixels with a
dark blood-pool column above them, a left/right wall march, and L-shaped
binary mask matching inside per-wall ROIs. The apex is found from temporal
block correlation along fan lines: correlation stays high in static body
layers and drops inside the moving myocardium.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import NoApexFound, NoCornerFound, ValveNotFound, WallNotFound
from .imgcore import GrayClip, GrayImage, PointF, gradient_image


class Rect(NamedTuple):
    """Half-open pixel rectangle [x0, x1) x [y0, y1)."""

    x0: int
    y0: int
    x1: int
    y1: int


@dataclass
class AnchorSet:
    """Septal corner, lateral corner and apex for one frame."""

    septal: PointF
    lateral: PointF
    apex: PointF
    frame_index: int
    provenance: dict = field(
        default_factory=lambda: {"septal": "auto", "lateral": "auto", "apex": "auto"}
    )

    def __post_init__(self):
        self.septal = PointF(*self.septal)
        self.lateral = PointF(*self.lateral)
        self.apex = PointF(*self.apex)
        if not self.septal.x < self.lateral.x:
            raise ValueError("septal corner must lie left of the lateral corner")
        if not self.apex.y < min(self.septal.y, self.lateral.y):
            raise ValueError("apex must lie above both valve corners")

    def base_midpoint(self) -> PointF:
        return PointF(
            (self.septal.x + self.lateral.x) / 2.0,
            (self.septal.y + self.lateral.y) / 2.0,
        )


@dataclass
class ValveDetectParams:
    bright_thresh: float = 140.0
    dark_thresh: float = 60.0
    dark_column_len: int = 8
    wall_step_thresh: float = 60.0
    roi_size: int = 31
    l_mask_size: int = 15
    binarize_thresh: float = 110.0
    mismatch_frac_max: float = 0.25

    def __post_init__(self):
        if not 0 <= self.dark_thresh < self.bright_thresh <= 255:
            raise ValueError("need 0 <= dark_thresh < bright_thresh <= 255")
        if not 0 < self.mismatch_frac_max < 1:
            raise ValueError("mismatch_frac_max must be in (0, 1)")
        for name in ("dark_column_len", "roi_size", "l_mask_size"):
            if getattr(self, name) < 3:
                raise ValueError(f"{name} must be >= 3 px")


@dataclass
class ApexDetectParams:
    n_main_lines: int = 5
    n_sub_lines: int = 5
    fan_half_angle_deg: float = 30.0
    sub_line_spacing: float = 4.0
    block_size: int = 16
    block_stride: int = 8
    corr_thresh: float = 0.9
    endo_offset: float = 5.0  # mm
    grad_sig_thresh: float = 80.0

    def __post_init__(self):
        if self.n_main_lines < 1 or self.n_sub_lines < 1:
            raise ValueError("need at least one main line and one sub-line")
        if self.block_size < 4:
            raise ValueError("block_size must be >= 4 px")
        if not 0 < self.corr_thresh < 1:
            raise ValueError("corr_thresh must be in (0, 1)")
        if self.endo_offset < 0:
            raise ValueError("endo_offset must be >= 0")


# ---------------------------------------------------------------------------
# Step 1: valve corners


def detect_valve_pixels(frame: GrayImage, p: ValveDetectParams) -> set[tuple[int, int]]:
    """Pixels >= bright_thresh with dark_column_len dark pixels directly above.

    Returns a set of (x, y) coordinates; empty when nothing qualifies.
    """
    img = frame.data
    L = p.dark_column_len
    h, w = img.shape
    if h <= L:
        return set()
    bright = img >= p.bright_thresh
    # colmax[y0, x] = max over img[y0 : y0+L, x]; for a pixel at row y the
    # column above it spans rows y-L .. y-1, i.e. window start y-L.
    colmax = sliding_window_view(img, L, axis=0).max(axis=-1)
    ok = bright[L:, :] & (colmax[: h - L, :] <= p.dark_thresh)
    ys, xs = np.nonzero(ok)
    return {(int(x), int(y + L)) for x, y in zip(xs, ys)}


def find_wall_hits(
    frame: GrayImage, seed: PointF, p: ValveDetectParams
) -> tuple[int, int]:
    """March from the seed left and right until the gray level jumps by
    wall_step_thresh above the running blood-pool mean; returns the hit
    columns (septal_x, lateral_x)."""
    img = frame.data
    row = int(round(seed.y))
    col = int(round(seed.x))
    if not (0 <= row < frame.height and 0 <= col < frame.width):
        raise WallNotFound("seed outside frame")

    def march(step: int) -> int:
        est = float(img[row, col])
        n = 1
        c = col + step
        while 0 <= c < frame.width:
            v = float(img[row, c])
            if v >= est + p.wall_step_thresh:
                return c
            est = (est * n + v) / (n + 1)
            n += 1
            c += step
        raise WallNotFound(f"no wall hit marching {'right' if step > 0 else 'left'}")

    lateral_x = march(+1)
    septal_x = march(-1)
    return septal_x, lateral_x


def make_l_mask(size: int, side: str) -> np.ndarray:
    """Binary L-shaped mask whose arms meet at the mask center.

    The arms span the full mask with thickness (size+1)//2, so the dark
    blood pool occupies exactly the quadrant diagonal to the corner: the
    upper-right quadrant for the septal corner (wall above-left, valve
    below-right), mirrored for the lateral corner. Centering the arm
    junction keeps the matched pixels centered on the true corner.
    """
    size = int(size) | 1  # keep odd so windows center on a pixel
    half = size // 2
    mask = np.ones((size, size), dtype=bool)
    if side == "septal":
        mask[:half, half + 1 :] = False
    elif side == "lateral":
        mask[:half, :half] = False
    else:
        raise ValueError(f"unknown side {side!r}")
    return mask


def detect_corner(
    frame: GrayImage, roi: Rect, side: str, p: ValveDetectParams
) -> PointF:
    """Mean location of roi pixels whose binarized surroundings match the
    side's L mask with mismatch fraction below mismatch_frac_max."""
    mask = make_l_mask(p.l_mask_size, side)
    S = mask.shape[0]
    half = S // 2
    # Keep only roi pixels whose full window fits inside the frame.
    x0 = max(roi.x0, half)
    y0 = max(roi.y0, half)
    x1 = min(roi.x1, frame.width - half)
    y1 = min(roi.y1, frame.height - half)
    if x1 <= x0 or y1 <= y0:
        raise NoCornerFound(f"{side} roi leaves no room for the mask window")
    binary = frame.data >= p.binarize_thresh
    region = binary[y0 - half : y1 + half, x0 - half : x1 + half]
    windows = sliding_window_view(region, (S, S))
    mismatch = (windows != mask).mean(axis=(2, 3))
    ys, xs = np.nonzero(mismatch < p.mismatch_frac_max)
    if ys.size == 0:
        raise NoCornerFound(f"no {side} corner pixels in roi")
    return PointF(float(xs.mean() + x0), float(ys.mean() + y0))


def detect_valve(frame: GrayImage, p: ValveDetectParams) -> tuple[PointF, PointF]:
    """Full Step-1 chain: valve pixels -> seed -> wall march -> per-wall ROI
    -> L-mask corner matching. Returns (septal, lateral)."""
    pixels = detect_valve_pixels(frame, p)
    if not pixels:
        raise ValveNotFound("valve_pixels", "no valve pixels detected")
    xs = np.array([px for px, _ in pixels], dtype=float)
    ys = np.array([py for _, py in pixels], dtype=float)
    valve_row = int(np.median(ys))
    seed = PointF(float(xs.mean()), float(ys.mean()) - p.dark_column_len / 2.0)
    try:
        septal_x, lateral_x = find_wall_hits(frame, seed, p)
    except WallNotFound as e:
        raise ValveNotFound("wall_search", str(e)) from e
    half = p.roi_size // 2
    corners = []
    for side, cx in (("septal", septal_x), ("lateral", lateral_x)):
        roi = Rect(cx - half, valve_row - half, cx + half + 1, valve_row + half + 1)
        try:
            corners.append(detect_corner(frame, roi, side, p))
        except NoCornerFound as e:
            raise ValveNotFound(f"corner_{side}", str(e)) from e
    septal, lateral = corners
    if not septal.x < lateral.x:
        raise ValveNotFound("corner_order", "septal corner not left of lateral")
    return septal, lateral


# ---------------------------------------------------------------------------
# Step 2: apex


def zncc(a: np.ndarray, b: np.ndarray) -> float:
    """Zero-normalized cross-correlation of two equal-shaped patches.

    Constant patches have no defined correlation; identical constant blocks
    count as perfectly correlated (static region), differing ones as 0.
    """
    a0 = a - a.mean()
    b0 = b - b.mean()
    na = math.sqrt(float((a0 * a0).sum()))
    nb = math.sqrt(float((b0 * b0).sum()))
    if na == 0.0 or nb == 0.0:
        return 1.0 if np.array_equal(a, b) else 0.0
    return float((a0 * b0).sum() / (na * nb))


def _block(img: np.ndarray, cx: int, cy: int, size: int) -> np.ndarray | None:
    half = size // 2
    y0, y1 = cy - half, cy - half + size
    x0, x1 = cx - half, cx - half + size
    if y0 < 0 or x0 < 0 or y1 > img.shape[0] or x1 > img.shape[1]:
        return None
    return img[y0:y1, x0:x1]


def _subline_centers(
    origin: np.ndarray, direction: np.ndarray, frame: GrayImage, p: ApexDetectParams
) -> list[tuple[int, int]]:
    """Integer block centers from the base outward until a block exits."""
    centers = []
    t = float(p.block_size)
    while True:
        pt = origin + t * direction
        cx, cy = int(round(pt[0])), int(round(pt[1]))
        if _block(frame.data, cx, cy, p.block_size) is None:
            break
        centers.append((cx, cy))
        t += p.block_stride
    return centers


def detect_apex(
    clip: GrayClip,
    frame_index: int,
    septal: PointF,
    lateral: PointF,
    p: ApexDetectParams,
) -> tuple[PointF, PointF]:
    """Epicardial and endocardial apex from the correlation-drop pattern.

    Returns (apex_endo, apex_epi). Raises NoApexFound when no sub-line shows
    the high-to-low mean-correlation transition.
    """
    if clip.n_frames < 3:
        raise ValueError("apex detection needs at least 3 frames")
    frame = clip.frames[frame_index]
    mid = np.array([(septal.x + lateral.x) / 2.0, (septal.y + lateral.y) / 2.0])
    base = np.array([lateral.x - septal.x, lateral.y - septal.y], dtype=float)
    base /= np.linalg.norm(base)
    normal = np.array([base[1], -base[0]])
    if normal[1] > 0:  # apex is toward the top of the image
        normal = -normal

    if p.n_main_lines == 1:
        angles = [0.0]
    else:
        angles = np.linspace(
            -p.fan_half_angle_deg, p.fan_half_angle_deg, p.n_main_lines
        )
    sub_offsets = (np.arange(p.n_sub_lines) - (p.n_sub_lines - 1) / 2.0) * p.sub_line_spacing

    frames = [f.data for f in clip.frames]
    candidates: list[tuple[float, int, tuple[int, int]]] = []
    sub_idx = 0
    for ang in angles:
        rad = math.radians(float(ang))
        c, s = math.cos(rad), math.sin(rad)
        u = np.array([c * normal[0] - s * normal[1], s * normal[0] + c * normal[1]])
        perp = np.array([-u[1], u[0]])
        for off in sub_offsets:
            origin = mid + off * perp
            centers = _subline_centers(origin, u, frame, p)
            if len(centers) >= 2:
                mean_corr = []
                for cx, cy in centers:
                    vals = []
                    for a, b in zip(frames[:-1], frames[1:]):
                        ba = _block(a, cx, cy, p.block_size)
                        bb = _block(b, cx, cy, p.block_size)
                        vals.append(zncc(ba, bb))
                    mean_corr.append(float(np.mean(vals)))
                # Walk from outside toward the base and take the first
                # high -> low transition of the mean correlation.
                for i in range(len(centers) - 2, -1, -1):
                    outer, inner = mean_corr[i + 1], mean_corr[i]
                    if outer >= p.corr_thresh and inner < p.corr_thresh:
                        pt = centers[i]
                        dist = float(np.hypot(pt[0] - mid[0], pt[1] - mid[1]))
                        candidates.append((dist, sub_idx, pt))
                        break
            sub_idx += 1

    if not candidates:
        raise NoApexFound("no sub-line showed a high-to-low correlation drop")
    # The drop points trace the epicardial border, which is nearly flat at
    # the apex cap, so the single farthest point is laterally noisy at block
    # resolution. Average every candidate within one block stride of the
    # maximum distance; symmetric flank picks then cancel out.
    best_dist = max(c[0] for c in candidates)
    near = np.array([c[2] for c in candidates if c[0] >= best_dist - p.block_stride])
    apex_epi = PointF(float(near[:, 0].mean()), float(near[:, 1].mean()))

    # Endocardial apex: significant gradient on the apex->midbase segment
    # near the apex, else a fixed physical offset toward the base.
    offset_px = p.endo_offset / clip.pixel_spacing
    toward = mid - np.array(apex_epi)
    seg_len = float(np.linalg.norm(toward))
    toward = toward / seg_len if seg_len > 0 else np.array([0.0, 1.0])
    grad = gradient_image(frame).data
    window = min(seg_len, max(3.0 * offset_px, 2.0 * p.block_size))
    apex_endo = None
    best_val, best_t = -1.0, 0.0
    t = 0.0
    while t <= window:
        pt = np.array(apex_epi) + t * toward
        gx, gy = int(round(pt[0])), int(round(pt[1]))
        if 0 <= gy < frame.height and 0 <= gx < frame.width:
            if grad[gy, gx] > best_val:
                best_val, best_t = float(grad[gy, gx]), t
        t += 1.0
    if best_val >= p.grad_sig_thresh:
        pt = np.array(apex_epi) + best_t * toward
        apex_endo = PointF(float(pt[0]), float(pt[1]))
    if apex_endo is None:
        t = min(offset_px, seg_len)
        pt = np.array(apex_epi) + t * toward
        apex_endo = PointF(float(pt[0]), float(pt[1]))
    return apex_endo, apex_epi
