from __future__ import annotations

import numpy as np
import pytest

from lvseg.errors import DegenerateManual, FrameCountMismatch, SpecInfeasible
from lvseg.evaluation import (
    GroundTruth,
    PhantomSpec,
    evaluate_clip,
    generate_phantom,
    percent_error,
    write_report,
)
from lvseg.imgcore import Contour, quantize

from .conftest import phantom


def _square(x0, y0, side):
    return Contour(
        np.array(
            [[x0, y0], [x0 + side, y0], [x0 + side, y0 + side], [x0, y0 + side]],
            dtype=float,
        ),
        0,
        kind="manual",
    )


def test_percent_error_identity_is_zero():
    sq = _square(1.5, 1.5, 10.0)
    assert percent_error(sq, sq, 20, 20) == 0.0


def test_percent_error_half_shifted_square_is_one():
    manual = _square(1.5, 1.5, 10.0)
    auto = _square(6.5, 1.5, 10.0)  # shifted by half its side
    assert percent_error(auto, manual, 25, 25) == 1.0


def test_percent_error_nested_square_is_064():
    manual = _square(1.5, 1.5, 10.0)  # 100 px
    auto = _square(3.5, 3.5, 6.0)  # 36 px, fully nested
    assert percent_error(auto, manual, 20, 20) == pytest.approx(0.64)


def test_percent_error_degenerate_manual():
    manual = _square(30.0, 30.0, 5.0)  # outside the raster
    auto = _square(1.5, 1.5, 10.0)
    with pytest.raises(DegenerateManual):
        percent_error(auto, manual, 20, 20)


def test_phantom_spec_infeasible():
    with pytest.raises(SpecInfeasible):
        PhantomSpec(n_frames=2)
    with pytest.raises(SpecInfeasible):
        PhantomSpec(semi_axis_x=100.0)
    with pytest.raises(SpecInfeasible):
        PhantomSpec(speckle_sigma=-1.0)


def test_phantom_is_deterministic():
    c1, g1 = generate_phantom(PhantomSpec(seed=5))
    c2, g2 = generate_phantom(PhantomSpec(seed=5))
    for a, b in zip(c1.frames, c2.frames):
        assert np.array_equal(a.data, b.data)
    assert g1.to_dict() == g2.to_dict()


def test_phantom_seed_changes_speckle():
    c1, _ = generate_phantom(PhantomSpec(seed=5))
    c2, _ = generate_phantom(PhantomSpec(seed=6))
    assert not np.array_equal(c1.frames[0].data, c2.frames[0].data)


def test_phantom_ground_truth_area_matches_analytic():
    spec = PhantomSpec(seed=0, speckle_sigma=0.0)
    _, gt = generate_phantom(spec)
    for k, (area, c) in enumerate(zip(gt.areas, gt.contours)):
        a = c.points[:, 0].max() - spec.cavity_center_x
        b = c.points[:, 1].max() - c.points[:, 1].min()  # frame's base to apex
        analytic = np.pi * a * b / 2.0
        assert abs(area - analytic) / analytic < 0.01, k


def test_phantom_apex_is_exact_and_static():
    _, gt = phantom(seed=0, sigma=6.0)
    apex0 = gt.anchors[0].apex
    for a in gt.anchors:
        assert a.apex == apex0


def test_ground_truth_round_trip(tmp_path):
    _, gt = phantom(seed=0, sigma=6.0)
    path = tmp_path / "gt.json"
    gt.save(path)
    back = GroundTruth.load(path)
    assert back.to_dict() == gt.to_dict()


def test_evaluate_clip_identity_and_report(tmp_path):
    from lvseg.pipeline import FrameResult, SegmentationResult

    _, gt = phantom(seed=0, sigma=6.0)
    frames = [
        FrameResult(k, a, c, None) for k, (a, c) in enumerate(zip(gt.anchors, gt.contours))
    ]
    result = SegmentationResult("self", "fp", frames)
    report = evaluate_clip(result, gt)
    assert report["mean_pct_error"] == 0.0
    assert all(e == 0.0 for e in report["per_frame"])
    assert all(a["apex"] == 0.0 for a in report["anchor_errors"])
    write_report(report, tmp_path / "r.json", tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "frame,pct_error,septal_err,lateral_err,apex_err"
    assert len(lines) == 1 + len(gt.contours)


def test_evaluate_clip_frame_count_mismatch():
    from lvseg.pipeline import FrameResult, SegmentationResult

    _, gt = phantom(seed=0, sigma=6.0)
    frames = [FrameResult(0, gt.anchors[0], gt.contours[0], None)]
    with pytest.raises(FrameCountMismatch):
        evaluate_clip(SegmentationResult("x", "fp", frames), gt)


def test_phantom_intensities_in_range():
    clip, _ = phantom(seed=3, sigma=10.0)
    for f in clip.frames:
        q = quantize(f)
        assert q.min() >= 0 and q.max() <= 255
