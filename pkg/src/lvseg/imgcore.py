"""Image and geometry primitives shared by all pipeline stages.

Intensities are carried as float64 in [0, 255] and only quantized to 8 bit
at file I/O, so repeated filtering does not accumulate quantization noise.
Coordinates are (x, y) = (column, row); y grows downward as in image space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from PIL import Image
from scipy import ndimage


class PointF(NamedTuple):
    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


@dataclass
class GrayImage:
    """Single grayscale frame; ``data`` is row-major, shape (height, width)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a 2-D image, got shape {arr.shape}")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def contains(self, p: PointF) -> bool:
        return 0 <= p.x < self.width and 0 <= p.y < self.height


@dataclass
class GrayClip:
    """Ordered frame sequence with physical metadata."""

    frames: list[GrayImage]
    frame_rate: float
    pixel_spacing: float
    clip_id: str = "clip"

    def __post_init__(self):
        if len(self.frames) < 2:
            raise ValueError("a clip needs at least 2 frames")
        w, h = self.frames[0].width, self.frames[0].height
        for f in self.frames[1:]:
            if f.width != w or f.height != h:
                raise ValueError("all frames must share the same dimensions")
        if self.frame_rate <= 0 or self.pixel_spacing <= 0:
            raise ValueError("frame_rate and pixel_spacing must be positive")

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height


@dataclass
class Contour:
    """Open polyline septal corner -> apex -> lateral corner for one frame."""

    points: np.ndarray
    frame_index: int
    kind: str = "initial"  # initial | refined | manual

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
            raise ValueError("a contour needs at least 3 (x, y) points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("contour coordinates must be finite")
        self.points = pts

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def first(self) -> PointF:
        return PointF(*self.points[0])

    def last(self) -> PointF:
        return PointF(*self.points[-1])


# ---------------------------------------------------------------------------
# Operations


def gradient_image(img: GrayImage) -> GrayImage:
    """Gradient-magnitude image, rescaled so the peak maps to 255.

    Central differences in the interior, one-sided at the borders
    (np.gradient semantics). A constant image maps to all zeros.
    """
    gy, gx = np.gradient(img.data)
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak > 0:
        mag = mag * (255.0 / peak)
    return GrayImage(mag)


def smooth_image(img: GrayImage, radius: int) -> GrayImage:
    """Low-pass filter: three passes of a (2*radius+1) box, Gaussian-like.

    radius 0 is the identity.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0:
        return img
    out = img.data
    size = 2 * int(radius) + 1
    for _ in range(3):
        out = ndimage.uniform_filter(out, size=size, mode="nearest")
    return GrayImage(out)


def polyline_smooth(points: Sequence[PointF] | np.ndarray, window: int) -> np.ndarray:
    """Moving-average smoothing along arc order with fixed endpoints.

    The window shrinks symmetrically near the ends so every average stays
    centered; the first and last points are returned unchanged.
    """
    pts = np.asarray([(p[0], p[1]) for p in points], dtype=float)
    n = pts.shape[0]
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be odd and >= 1")
    if window > n:
        raise ValueError("window cannot exceed the point count")
    if window == 1 or n <= 2:
        return pts.copy()
    half = window // 2
    out = pts.copy()
    for i in range(1, n - 1):
        k = min(half, i, n - 1 - i)
        out[i] = pts[i - k : i + k + 1].mean(axis=0)
    return out


def rasterize_polygon(points: np.ndarray, width: int, height: int) -> np.ndarray:
    """Even-odd fill of a closed polygon on the pixel-center grid.

    A pixel (ix, iy) belongs to the region iff its center lies inside the
    polygon (points are implicitly closed last -> first). Returns a bool
    mask of shape (height, width).
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    if n < 3:
        raise ValueError("polygon needs at least 3 vertices")
    # Count, per pixel, edge crossings of the ray toward +x (strictly to the
    # right of the pixel center); odd count = inside.
    delta = np.zeros((height, width + 1), dtype=np.int64)
    ys = np.arange(height, dtype=float)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        if y1 == y2:
            continue
        ymin, ymax = (y1, y2) if y1 < y2 else (y2, y1)
        rows = np.nonzero((ys >= ymin) & (ys < ymax))[0]
        if rows.size == 0:
            continue
        xc = x1 + (ys[rows] - y1) * (x2 - x1) / (y2 - y1)
        # crossing counts for pixel x iff x < xc
        idx = np.clip(np.ceil(xc).astype(np.int64), 0, width)
        np.add.at(delta, (rows, np.zeros_like(idx)), 1)
        np.add.at(delta, (rows, idx), -1)
    counts = np.cumsum(delta[:, :-1], axis=1)
    return (counts % 2) == 1


def polygon_self_intersects(points: np.ndarray) -> bool:
    """True when any two non-adjacent edges of the closed polygon cross."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    if n < 4:
        return False
    a = pts
    b = np.roll(pts, -1, axis=0)

    def cross(o, p, q):
        return (p[..., 0] - o[..., 0]) * (q[..., 1] - o[..., 1]) - (
            p[..., 1] - o[..., 1]
        ) * (q[..., 0] - o[..., 0])

    i_idx, j_idx = np.triu_indices(n, k=2)
    # skip the wrap-around adjacency (first and last edge share a vertex)
    keep = ~((i_idx == 0) & (j_idx == n - 1))
    i_idx, j_idx = i_idx[keep], j_idx[keep]
    p1, p2 = a[i_idx], b[i_idx]
    q1, q2 = a[j_idx], b[j_idx]
    d1 = cross(p1, p2, q1)
    d2 = cross(p1, p2, q2)
    d3 = cross(q1, q2, p1)
    d4 = cross(q1, q2, p2)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    return bool(proper.any())


# ---------------------------------------------------------------------------
# Clip / frame I/O


def quantize(img: GrayImage) -> np.ndarray:
    """Round and clip to uint8 for file output."""
    return np.clip(np.rint(img.data), 0, 255).astype(np.uint8)


def write_pgm(img: GrayImage, path: str | Path) -> None:
    arr = quantize(img)
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
    Path(path).write_bytes(header + arr.tobytes())


def read_pgm(path: str | Path) -> GrayImage:
    raw = Path(path).read_bytes()
    # Parse the three header tokens (magic, dims, maxval), tolerating comments.
    tokens: list[bytes] = []
    i = 0
    while len(tokens) < 4:
        while i < len(raw) and raw[i : i + 1].isspace():
            i += 1
        if raw[i : i + 1] == b"#":
            while i < len(raw) and raw[i : i + 1] != b"\n":
                i += 1
            continue
        j = i
        while j < len(raw) and not raw[j : j + 1].isspace():
            j += 1
        tokens.append(raw[i:j])
        i = j
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 is supported")
    i += 1  # single whitespace after maxval
    data = np.frombuffer(raw[i : i + width * height], dtype=np.uint8)
    if data.size != width * height:
        raise ValueError(f"{path}: truncated pixel data")
    return GrayImage(data.reshape(height, width).astype(float))


def write_png(img: GrayImage, path: str | Path) -> None:
    Image.fromarray(quantize(img), mode="L").save(str(path))


def read_frame(path: str | Path) -> GrayImage:
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return read_pgm(path)
    with Image.open(str(path)) as im:
        return GrayImage(np.asarray(im.convert("L"), dtype=float))


def save_clip(clip: GrayClip, out_dir: str | Path, fmt: str = "pgm") -> Path:
    """Write frames plus a clip.json manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt not in ("pgm", "png"):
        raise ValueError("fmt must be 'pgm' or 'png'")
    names = []
    for k, frame in enumerate(clip.frames):
        name = f"frame_{k:04d}.{fmt}"
        if fmt == "pgm":
            write_pgm(frame, out_dir / name)
        else:
            write_png(frame, out_dir / name)
        names.append(name)
    manifest = {
        "clip_id": clip.clip_id,
        "frame_rate_hz": clip.frame_rate,
        "pixel_spacing_mm": clip.pixel_spacing,
        "frames": names,
    }
    path = out_dir / "clip.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def load_clip(clip_dir: str | Path) -> GrayClip:
    clip_dir = Path(clip_dir)
    manifest_path = clip_dir / "clip.json"
    if not manifest_path.is_file():
        raise FileNotFoundError(f"clip manifest not found: {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    frames = [read_frame(clip_dir / name) for name in manifest["frames"]]
    return GrayClip(
        frames=frames,
        frame_rate=float(manifest["frame_rate_hz"]),
        pixel_spacing=float(manifest["pixel_spacing_mm"]),
        clip_id=str(manifest.get("clip_id", clip_dir.name)),
    )
