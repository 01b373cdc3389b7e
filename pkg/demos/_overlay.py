"""Shared helper for the demo scripts: draw anchors and contours on a frame."""

from __future__ import annotations

import numpy as np
from PIL import Image, ImageDraw

from lvseg import GrayImage
from lvseg.imgcore import quantize


def overlay(
    frame: GrayImage,
    contours: dict[str, np.ndarray] | None = None,
    points: dict[str, tuple[float, float]] | None = None,
    scale: int = 3,
) -> Image.Image:
    """RGB rendering of a frame with colored polylines and cross markers."""
    colors = {
        "initial": (255, 220, 0),
        "refined": (0, 220, 80),
        "manual": (80, 160, 255),
        "septal": (255, 80, 80),
        "lateral": (255, 80, 80),
        "apex": (255, 0, 255),
    }
    img = Image.fromarray(quantize(frame), mode="L").convert("RGB")
    img = img.resize((frame.width * scale, frame.height * scale), Image.NEAREST)
    draw = ImageDraw.Draw(img)
    for name, pts in (contours or {}).items():
        xy = [(float(x) * scale, float(y) * scale) for x, y in pts]
        draw.line(xy, fill=colors.get(name, (255, 255, 255)), width=2)
    for name, (x, y) in (points or {}).items():
        cx, cy = x * scale, y * scale
        c = colors.get(name, (255, 255, 255))
        draw.line([(cx - 6, cy), (cx + 6, cy)], fill=c, width=2)
        draw.line([(cx, cy - 6), (cx, cy + 6)], fill=c, width=2)
    return img
