"""Valve-corner tracking through the clip via the dual-block SAD criterion.

Each corner carries two reference patches: a big block centered on the
corner and a smaller one shifted off-center toward the atrium. A candidate
shift is scored by SAD_big^2 * SAD_small; the minimizing integer shift in
the search window becomes the new corner position and the reference patches
are re-extracted there (reference replacement).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .anatomy import AnchorSet
from .errors import DimensionMismatch, SearchWindowOutOfBounds
from .imgcore import GrayClip, GrayImage, PointF


@dataclass
class TrackParams:
    big_size: tuple[int, int] = (21, 21)  # (n1, m1) = (rows, cols)
    small_size: tuple[int, int] = (11, 11)
    small_offset: tuple[int, int] = (6, -6)  # (dx, dy), elevated = negative dy
    search_radius: int = 8

    def __post_init__(self):
        if self.search_radius < 1:
            raise ValueError("search_radius must be >= 1")
        if min(self.big_size) < 4 or min(self.small_size) < 4:
            raise ValueError("block sizes must be >= 4 px")
        if not (
            self.small_size[0] < self.big_size[0]
            and self.small_size[1] < self.big_size[1]
        ):
            raise ValueError("small block must be smaller than the big block")


@dataclass
class BlockPair:
    """Reference patches for one corner, extracted at an integer position."""

    big: np.ndarray
    small: np.ndarray


def sad(ref_patch: np.ndarray, cand_patch: np.ndarray) -> float:
    """Sum of absolute intensity differences over two equal-sized patches."""
    if ref_patch.shape != cand_patch.shape:
        raise DimensionMismatch(
            f"patch shapes differ: {ref_patch.shape} vs {cand_patch.shape}"
        )
    return float(np.abs(ref_patch - cand_patch).sum())


def combined_sad(sad1: float, sad2: float) -> float:
    """Combined score with the big-block SAD squared for weight amplification."""
    return sad1 * sad1 * sad2


def _patch(img: np.ndarray, cx: int, cy: int, size: tuple[int, int]) -> np.ndarray:
    n, m = size
    y0 = cy - n // 2
    x0 = cx - m // 2
    if y0 < 0 or x0 < 0 or y0 + n > img.shape[0] or x0 + m > img.shape[1]:
        raise SearchWindowOutOfBounds(
            f"patch {size} at ({cx}, {cy}) exits the frame"
        )
    return img[y0 : y0 + n, x0 : x0 + m]


def extract_blocks(frame: GrayImage, pos: PointF, p: TrackParams) -> BlockPair:
    cx, cy = int(round(pos.x)), int(round(pos.y))
    dx, dy = p.small_offset
    return BlockPair(
        big=_patch(frame.data, cx, cy, p.big_size),
        small=_patch(frame.data, cx + dx, cy + dy, p.small_size),
    )


def track_step(
    ref: BlockPair, next_frame: GrayImage, prev_pos: PointF, p: TrackParams
) -> tuple[PointF, BlockPair, float]:
    """One tracking step: exhaustive integer search of the dual-block score.

    Ties break toward the smallest shift magnitude, then smallest k (x
    shift), then smallest l (y shift). Returns (new_pos, new_ref, score).
    """
    img = next_frame.data
    cx, cy = int(round(prev_pos.x)), int(round(prev_pos.y))
    r = p.search_radius
    best = None
    for k in range(-r, r + 1):
        for l in range(-r, r + 1):
            big = _patch(img, cx + k, cy + l, p.big_size)
            dx, dy = p.small_offset
            small = _patch(img, cx + k + dx, cy + l + dy, p.small_size)
            score = combined_sad(sad(ref.big, big), sad(ref.small, small))
            key = (score, k * k + l * l, k, l)
            if best is None or key < best[0]:
                best = (key, k, l)
    _, k, l = best
    new_pos = PointF(prev_pos.x + k, prev_pos.y + l)
    new_ref = extract_blocks(next_frame, new_pos, p)
    return new_pos, new_ref, best[0][0]


def _track_chain(
    frames: list[GrayImage], start_idx: int, start_pos: PointF, p: TrackParams
) -> list[PointF]:
    """Chained tracking over the frame list starting at start_idx."""
    positions = [PointF(0.0, 0.0)] * len(frames)
    positions[start_idx] = start_pos
    for direction in (+1, -1):
        ref = extract_blocks(frames[start_idx], start_pos, p)
        pos = start_pos
        i = start_idx + direction
        while 0 <= i < len(frames):
            try:
                pos, ref, _ = track_step(ref, frames[i], pos, p)
            except SearchWindowOutOfBounds as e:
                raise SearchWindowOutOfBounds(str(e), frame_index=i) from e
            positions[i] = pos
            i += direction
    return positions


def track_corners(
    clip: GrayClip, anchors0: AnchorSet, p: TrackParams
) -> list[tuple[PointF, PointF]]:
    """Per-frame (septal, lateral) corner positions.

    The anchor frame keeps anchors0's corners exactly; other frames come
    from chained track_step forward to the clip end and backward to the
    start. The two corner chains are independent.
    """
    septal = _track_chain(clip.frames, anchors0.frame_index, anchors0.septal, p)
    lateral = _track_chain(clip.frames, anchors0.frame_index, anchors0.lateral, p)
    return list(zip(septal, lateral))
