"""Localized region-based active-contour refinement of the initial contour.

The open contour (closed by its base chord for region purposes) evolves as
an explicit polyline: each point moves along its inward normal proportional
to (I - mean_in)^2 - (I - mean_out)^2, where the means are taken over the
interior/exterior portions of a disk around the point, plus a Laplacian
smoothing pull. Points near the valve corners are clamped to their initial
positions so the curve cannot leak into the atrium.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .anatomy import AnchorSet
from .errors import EmptySide
from .imgcore import (
    Contour,
    GrayImage,
    PointF,
    polygon_self_intersects,
    rasterize_polygon,
)


@dataclass
class SnakeParams:
    radius: int = 12
    max_iters: int = 60
    step_size: float = 0.4
    smoothness_weight: float = 0.2
    band_halfwidth: int = 16
    valve_clamp_radius: float = 6.0
    convergence_tol: float = 0.05

    def __post_init__(self):
        if self.radius < 2:
            raise ValueError("radius must be >= 2 px")
        if self.max_iters < 0 or self.step_size <= 0:
            raise ValueError("max_iters must be >= 0 and step_size positive")
        if self.valve_clamp_radius < 0:
            raise ValueError("valve_clamp_radius must be >= 0")


def _disk_offsets(radius: int) -> tuple[np.ndarray, np.ndarray]:
    r = int(radius)
    dy, dx = np.mgrid[-r : r + 1, -r : r + 1]
    keep = dx * dx + dy * dy <= r * r
    return dx[keep], dy[keep]


def local_means(
    img: GrayImage,
    boundary_point: PointF,
    interior_mask: np.ndarray,
    radius: int,
) -> tuple[float, float]:
    """Mean intensity of the interior and exterior portions of the disk of
    the given radius around the boundary point."""
    dx, dy = _disk_offsets(radius)
    cx, cy = int(round(boundary_point[0])), int(round(boundary_point[1]))
    xs = cx + dx
    ys = cy + dy
    valid = (xs >= 0) & (xs < img.width) & (ys >= 0) & (ys < img.height)
    xs, ys = xs[valid], ys[valid]
    inside = interior_mask[ys, xs]
    vals = img.data[ys, xs]
    if not inside.any() or inside.all() or xs.size == 0:
        raise EmptySide("disk does not straddle the region boundary")
    return float(vals[inside].mean()), float(vals[~inside].mean())


def _batched_means(
    img01: np.ndarray, mask: np.ndarray, pts: np.ndarray, radius: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-point (mean_in, mean_out, empty_side_flag) for all points at once."""
    h, w = img01.shape
    dx, dy = _disk_offsets(radius)
    cx = np.rint(pts[:, 0]).astype(int)
    cy = np.rint(pts[:, 1]).astype(int)
    xs = cx[:, None] + dx[None, :]
    ys = cy[:, None] + dy[None, :]
    valid = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
    xs_c = np.clip(xs, 0, w - 1)
    ys_c = np.clip(ys, 0, h - 1)
    vals = img01[ys_c, xs_c]
    inside = mask[ys_c, xs_c] & valid
    outside = ~mask[ys_c, xs_c] & valid
    n_in = inside.sum(axis=1)
    n_out = outside.sum(axis=1)
    empty = (n_in == 0) | (n_out == 0)
    with np.errstate(invalid="ignore"):
        mean_in = np.where(n_in > 0, (vals * inside).sum(axis=1) / np.maximum(n_in, 1), 0.0)
        mean_out = np.where(
            n_out > 0, (vals * outside).sum(axis=1) / np.maximum(n_out, 1), 0.0
        )
    return mean_in, mean_out, empty


def _inward_normals(pts: np.ndarray) -> np.ndarray:
    """Unit normals pointing into the region bounded by the closed polyline."""
    prev_pts = np.roll(pts, 1, axis=0)
    next_pts = np.roll(pts, -1, axis=0)
    tang = next_pts - prev_pts
    norm = np.stack([-tang[:, 1], tang[:, 0]], axis=1)
    length = np.linalg.norm(norm, axis=1)
    length[length == 0] = 1.0
    norm /= length[:, None]
    x, y = pts[:, 0], pts[:, 1]
    area2 = np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    if area2 < 0:
        norm = -norm
    return norm


def evolve(
    frame: GrayImage, init: Contour, anchors: AnchorSet, p: SnakeParams
) -> Contour:
    """Iterate the localized mean-separation descent on the initial contour.

    Stops at max_iters, on convergence (mean displacement below
    convergence_tol), or rolls back and stops if an iteration would
    self-intersect the curve.
    """
    pts = init.points.copy()
    if p.max_iters == 0:
        return Contour(points=pts, frame_index=init.frame_index, kind="refined")

    init_pts = init.points.copy()
    d_sep = np.linalg.norm(init_pts - np.asarray(anchors.septal), axis=1)
    d_lat = np.linalg.norm(init_pts - np.asarray(anchors.lateral), axis=1)
    clamped = (d_sep <= p.valve_clamp_radius) | (d_lat <= p.valve_clamp_radius)
    clamped[0] = clamped[-1] = True

    img01 = frame.data / 255.0
    h, w = img01.shape
    for _ in range(p.max_iters):
        mask = rasterize_polygon(pts, w, h)
        mean_in, mean_out, empty = _batched_means(img01, mask, pts, p.radius)
        if empty[~clamped].any():
            raise EmptySide("contour disk lost one side of the region")
        ix = np.clip(np.rint(pts[:, 0]).astype(int), 0, w - 1)
        iy = np.clip(np.rint(pts[:, 1]).astype(int), 0, h - 1)
        I = img01[iy, ix]
        force = (I - mean_in) ** 2 - (I - mean_out) ** 2
        normals = _inward_normals(pts)
        midpoints = 0.5 * (np.roll(pts, 1, axis=0) + np.roll(pts, -1, axis=0))
        new_pts = (
            pts
            + p.step_size * force[:, None] * normals
            + p.smoothness_weight * (midpoints - pts)
        )
        new_pts[clamped] = init_pts[clamped]
        new_pts[:, 0] = np.clip(new_pts[:, 0], 0, w - 1)
        new_pts[:, 1] = np.clip(new_pts[:, 1], 0, h - 1)
        if polygon_self_intersects(new_pts):
            break
        mean_disp = float(np.linalg.norm(new_pts - pts, axis=1).mean())
        pts = new_pts
        if mean_disp < p.convergence_tol:
            break
    return Contour(points=pts, frame_index=init.frame_index, kind="refined")
