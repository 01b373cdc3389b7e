from __future__ import annotations

import numpy as np
import pytest

from lvseg.imgcore import (
    Contour,
    GrayClip,
    GrayImage,
    PointF,
    gradient_image,
    load_clip,
    polygon_self_intersects,
    polyline_smooth,
    quantize,
    rasterize_polygon,
    read_pgm,
    save_clip,
    smooth_image,
    write_pgm,
)


def test_gray_image_requires_2d():
    with pytest.raises(ValueError):
        GrayImage(np.zeros(5))
    with pytest.raises(ValueError):
        GrayImage(np.zeros((2, 3, 4)))


def test_gray_image_is_write_protected():
    img = GrayImage(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        img.data[0, 0] = 1.0


def test_gray_clip_invariants():
    f = GrayImage(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        GrayClip(frames=[f], frame_rate=30.0, pixel_spacing=1.0)
    g = GrayImage(np.zeros((5, 4)))
    with pytest.raises(ValueError):
        GrayClip(frames=[f, g], frame_rate=30.0, pixel_spacing=1.0)
    clip = GrayClip(frames=[f, f, f], frame_rate=30.0, pixel_spacing=1.0)
    assert clip.n_frames == 3


def test_contour_needs_three_finite_points():
    with pytest.raises(ValueError):
        Contour(np.array([[0.0, 0.0], [1.0, 1.0]]), 0)
    with pytest.raises(ValueError):
        Contour(np.array([[0.0, 0.0], [1.0, np.nan], [2.0, 2.0]]), 0)


def test_gradient_image_flat_is_zero_and_peak_is_255():
    flat = gradient_image(GrayImage(np.full((8, 8), 37.0)))
    assert flat.data.max() == 0.0
    step = np.zeros((8, 8))
    step[:, 4:] = 100.0
    g = gradient_image(GrayImage(step))
    assert g.data.max() == pytest.approx(255.0)
    assert g.data[:, 0].max() == 0.0


def test_smooth_image_preserves_constants_and_identity_at_zero():
    img = GrayImage(np.full((10, 10), 55.0))
    out = smooth_image(img, 2)
    assert np.allclose(out.data, 55.0)
    same = smooth_image(img, 0)
    assert same is img


def test_polyline_smooth_fixes_endpoints():
    rng = np.random.default_rng(1)
    pts = rng.uniform(0, 100, size=(11, 2))
    out = polyline_smooth(pts, 5)
    assert np.array_equal(out[0], pts[0])
    assert np.array_equal(out[-1], pts[-1])
    with pytest.raises(ValueError):
        polyline_smooth(pts, 4)  # even window


def _inside_even_odd(px: float, py: float, poly: np.ndarray) -> bool:
    """Independent scalar even-odd point-in-polygon check."""
    inside = False
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 <= py < y2) or (y2 <= py < y1):
            xc = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < xc:
                inside = not inside
    return inside


def test_rasterize_polygon_square_area():
    # square covering pixel centers 2..11 in both axes
    sq = np.array([[1.5, 1.5], [11.5, 1.5], [11.5, 11.5], [1.5, 11.5]])
    mask = rasterize_polygon(sq, 20, 20)
    assert mask.sum() == 100
    assert mask[2, 2] and mask[11, 11]
    assert not mask[1, 1] and not mask[12, 12]


def test_rasterize_polygon_matches_scalar_oracle_on_random_polygons():
    rng = np.random.default_rng(7)
    for _ in range(5):
        poly = rng.uniform(1, 19, size=(7, 2))
        mask = rasterize_polygon(poly, 20, 20)
        for iy in range(20):
            for ix in range(20):
                assert mask[iy, ix] == _inside_even_odd(ix, iy, poly), (ix, iy)


def test_polygon_self_intersects():
    square = np.array([[0, 0], [10, 0], [10, 10], [0, 10]], dtype=float)
    bowtie = np.array([[0, 0], [10, 10], [10, 0], [0, 10]], dtype=float)
    assert not polygon_self_intersects(square)
    assert polygon_self_intersects(bowtie)


def test_pgm_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(3)
    img = GrayImage(rng.integers(0, 256, size=(17, 23)).astype(float))
    path = tmp_path / "img.pgm"
    write_pgm(img, path)
    back = read_pgm(path)
    assert np.array_equal(quantize(img), quantize(back))
    write_pgm(back, tmp_path / "img2.pgm")
    assert path.read_bytes() == (tmp_path / "img2.pgm").read_bytes()


def test_clip_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    frames = [GrayImage(rng.integers(0, 256, size=(12, 10)).astype(float)) for _ in range(3)]
    clip = GrayClip(frames=frames, frame_rate=25.0, pixel_spacing=0.5, clip_id="rt")
    save_clip(clip, tmp_path / "c")
    back = load_clip(tmp_path / "c")
    assert back.clip_id == "rt"
    assert back.frame_rate == 25.0
    assert back.pixel_spacing == 0.5
    for a, b in zip(clip.frames, back.frames):
        assert np.array_equal(quantize(a), quantize(b))


def test_load_clip_missing_manifest(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_clip(tmp_path)


def test_pointf_as_array():
    p = PointF(1.5, 2.5)
    assert np.array_equal(p.as_array(), [1.5, 2.5])
