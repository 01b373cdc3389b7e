"""Initial endocardial contour via dynamic programming.

Each frame is split into a left half (apex + septal corner) and a right half
(apex + lateral corner). Per half, the gradient image feeds a row-by-row DP:
accumulated weights reward strong gradients (negative factor fg), penalize
lateral jumps (fdx) and path curvature (fd2x), and a large negative apex
bonus forces the path through the apex. Backtracking from the valve corner
yields one column per row; the two paths are joined and smoothed.

Rows are indexed apex (row 0) to base (last row).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .anatomy import AnchorSet
from .errors import DegenerateGeometry
from .imgcore import Contour, GrayImage, PointF, gradient_image, polyline_smooth, smooth_image


@dataclass
class DpParams:
    fg: float = -1.0
    fdx: float = 2.0
    fd2x: float = 4.0
    DX: int = 3
    apex_bonus: float = -1.0e6
    tol_anchor: float = 1.0

    def __post_init__(self):
        if self.fg >= 0:
            raise ValueError("fg must be negative (gradient reward)")
        if self.fdx <= 0 or self.fd2x < 0:
            raise ValueError("fdx must be positive and fd2x nonnegative")
        if self.DX < 1:
            raise ValueError("DX must be >= 1")


@dataclass
class HalfImage:
    """One half of the ventricle; row 0 holds the apex, the last row the
    valve corner."""

    img: GrayImage
    apex_col: int
    corner_col: int
    side: str  # left | right
    frame_index: int
    origin: tuple[int, int] = (0, 0)  # (x0, y0) of the crop in frame coords

    def __post_init__(self):
        h, w = self.img.data.shape
        if h < 3:
            raise DegenerateGeometry("half image needs at least 3 rows")
        if not (0 <= self.apex_col < w and 0 <= self.corner_col < w):
            raise DegenerateGeometry("apex/corner column out of bounds")


@dataclass
class DpState:
    W: np.ndarray  # accumulated weights, shape (n_rows, n_cols)
    F: np.ndarray  # predecessor column per cell, valid for rows >= 1
    apex_col: int
    # step-augmented tables driving exact backtracking: axis 2 indexes the
    # incoming step d = x - x_prev over [-(DX-1), DX-1]
    W3: np.ndarray | None = None  # (n_rows, n_cols, n_steps)
    F3: np.ndarray | None = None  # predecessor step index per (row, col, step)
    steps: np.ndarray | None = None

    @property
    def n_rows(self) -> int:
        return self.W.shape[0]

    @property
    def n_cols(self) -> int:
        return self.W.shape[1]


def partition_ventricle(
    frame: GrayImage, anchors: AnchorSet, margin: int = 10
) -> tuple[HalfImage, HalfImage]:
    """Axis-aligned halves spanning apex row to corner row, apex/corner
    columns widened by the margin; both halves share the apex."""
    apex_y = int(round(anchors.apex.y))
    apex_x = int(round(anchors.apex.x))
    halves = []
    for side, corner in (("left", anchors.septal), ("right", anchors.lateral)):
        corner_y = int(round(corner.y))
        corner_x = int(round(corner.x))
        if apex_y >= corner_y:
            raise DegenerateGeometry("apex must lie above the valve corners")
        x0 = max(0, min(apex_x, corner_x) - margin)
        x1 = min(frame.width - 1, max(apex_x, corner_x) + margin)
        if x1 - x0 + 1 < 3:
            raise DegenerateGeometry(f"{side} half narrower than 3 px")
        y0 = max(0, apex_y)
        y1 = min(frame.height - 1, corner_y)
        crop = GrayImage(frame.data[y0 : y1 + 1, x0 : x1 + 1])
        halves.append(
            HalfImage(
                img=crop,
                apex_col=apex_x - x0,
                corner_col=corner_x - x0,
                side=side,
                frame_index=anchors.frame_index,
                origin=(x0, y0),
            )
        )
    return halves[0], halves[1]


def _step_order(DX: int) -> list[int]:
    """Steps d = x - x_prev ordered by |d|, then smaller predecessor column
    (x' = x - d, so positive d first); strict-improvement updates in this
    order realize the argmin tie-break."""
    order = [0]
    for d in range(1, DX):
        order.extend([d, -d])
    return order


def dp_forward(g: HalfImage, p: DpParams) -> DpState:
    """Fill the accumulated-weight tables for the minimum-cost path.

    Row 0 gets the apex bonus at the apex column plus the gradient reward;
    row 1 adds the jump penalty fdx*|x-x'|; later rows add the curvature
    penalty fd2x*|x + x'' - 2x'|. The state carries the incoming step
    d = x - x' alongside the column, which makes the curvature term
    fd2x*|d - d'| a function of consecutive states, so the minimum is
    exact over every admissible path. W and F expose the per-cell
    marginals; W3/F3 drive backtracking.
    """
    G = g.img.data
    n_rows, n_cols = G.shape
    steps = np.array(_step_order(p.DX), dtype=int)
    n_steps = len(steps)
    INF = np.inf
    cols = np.arange(n_cols)

    W3 = np.full((n_rows, n_cols, n_steps), INF)
    F3 = np.zeros((n_rows, n_cols, n_steps), dtype=int)
    row0 = p.fg * G[0, :].copy()
    row0[g.apex_col] += p.apex_bonus
    W3[0, :, :] = row0[:, None]  # no incoming step yet; replicate

    for y in range(1, n_rows):
        for di, d in enumerate(steps):
            src = cols - d  # predecessor column x' = x - d
            valid = (src >= 0) & (src < n_cols)
            if not valid.any():
                continue
            base = p.fg * G[y, valid.nonzero()[0]] + p.fdx * abs(d)
            best = np.full(valid.sum(), INF)
            best_from = np.zeros(valid.sum(), dtype=int)
            for dpi, d_prev in enumerate(steps):
                cand = W3[y - 1, src[valid], dpi]
                if y >= 2:
                    cand = cand + p.fd2x * abs(d - d_prev)
                improve = cand < best
                best[improve] = cand[improve]
                best_from[improve] = dpi
            W3[y, valid, di] = base + best
            F3[y, valid, di] = best_from

    # per-cell marginals for inspection: best incoming step per (row, col)
    best_step = np.argmin(W3, axis=2)  # first (tie-break) index of the min
    W = np.take_along_axis(W3, best_step[:, :, None], axis=2)[:, :, 0]
    F = np.clip(cols[None, :] - steps[best_step], 0, n_cols - 1)
    F[0, :] = 0
    return DpState(W=W, F=F, apex_col=g.apex_col, W3=W3, F3=F3, steps=steps)


def dp_backtrack(state: DpState, corner_col: int) -> np.ndarray:
    """Column index per row, walking predecessors up from the valve corner."""
    if not 0 <= corner_col < state.n_cols:
        raise ValueError("corner_col out of bounds")
    path = np.zeros(state.n_rows, dtype=int)
    path[-1] = corner_col
    if state.n_rows == 1:
        return path
    di = int(np.argmin(state.W3[-1, corner_col, :]))
    x = corner_col
    for y in range(state.n_rows - 1, 0, -1):
        d = int(state.steps[di])
        di = int(state.F3[y, x, di])
        x = x - d
        path[y - 1] = x
    return path


def path_cost(path: np.ndarray, g: HalfImage, p: DpParams) -> float:
    """Re-sum the cost of an explicit path; used by oracle checks."""
    G = g.img.data
    rows = np.arange(len(path))
    total = float(np.sum(p.fg * G[rows, path]))
    if path[0] == g.apex_col:
        total += p.apex_bonus
    d1 = np.diff(path)
    total += float(p.fdx * np.abs(d1).sum())
    if len(path) >= 3:
        d2 = path[2:] - 2 * path[1:-1] + path[:-2]
        total += float(p.fd2x * np.abs(d2).sum())
    return total


def half_path(g: HalfImage, p: DpParams) -> np.ndarray:
    """dp_forward + dp_backtrack on the gradient image of the half."""
    grad = gradient_image(g.img)
    state = dp_forward(
        HalfImage(
            img=grad,
            apex_col=g.apex_col,
            corner_col=g.corner_col,
            side=g.side,
            frame_index=g.frame_index,
            origin=g.origin,
        ),
        p,
    )
    return dp_backtrack(state, g.corner_col)


def initial_contour(
    frame: GrayImage,
    anchors: AnchorSet,
    p: DpParams,
    smooth_window: int = 5,
    margin: int = 10,
    smooth_radius: int = 2,
) -> Contour:
    """Step-4 initial contour: partition, preprocess, per-half DP path,
    join left (base->apex) with right (apex->base), then smooth with the
    valve-corner endpoints held fixed."""
    pre = smooth_image(frame, smooth_radius)
    left, right = partition_ventricle(pre, anchors, margin=margin)
    lp = half_path(left, p)
    rp = half_path(right, p)

    lx0, ly0 = left.origin
    rx0, ry0 = right.origin
    left_pts = [(lx0 + lp[y], ly0 + y) for y in range(len(lp))]
    right_pts = [(rx0 + rp[y], ry0 + y) for y in range(len(rp))]
    # left path base->apex, then right path apex->base minus duplicated apex
    pts = left_pts[::-1] + right_pts[1:]
    pts = np.asarray(pts, dtype=float)
    pts[0] = anchors.septal
    pts[-1] = anchors.lateral
    window = min(smooth_window, len(pts) if len(pts) % 2 == 1 else len(pts) - 1)
    smoothed = polyline_smooth(pts, window)
    return Contour(points=smoothed, frame_index=anchors.frame_index, kind="initial")
