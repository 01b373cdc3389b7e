from __future__ import annotations

import numpy as np
import pytest

from lvseg.anatomy import AnchorSet
from lvseg.dpcontour import (
    DpParams,
    HalfImage,
    dp_backtrack,
    dp_forward,
    initial_contour,
    partition_ventricle,
    path_cost,
)
from lvseg.errors import DegenerateGeometry
from lvseg.imgcore import GrayImage, PointF

from .conftest import phantom
from .dp_oracle import enumerate_min_cost, random_case


def test_dp_matches_exhaustive_enumeration():
    rng = np.random.default_rng(42)
    for _ in range(25):
        g, p = random_case(rng)
        state = dp_forward(g, p)
        path = dp_backtrack(state, g.corner_col)
        assert path_cost(path, g, p) == enumerate_min_cost(g, p)


def test_dp_prefers_apex_column():
    # uniform gradient: the only cost structure is the apex bonus and the
    # movement penalties, so the path must start at the apex column
    G = np.full((6, 7), 10.0)
    p = DpParams(fg=-1.0, fdx=2.0, fd2x=1.0, DX=3)
    g = HalfImage(img=GrayImage(G), apex_col=1, corner_col=5, side="left", frame_index=0)
    path = dp_backtrack(dp_forward(g, p), 5)
    assert path[0] == 1
    assert path[-1] == 5
    assert np.all(np.abs(np.diff(path)) < p.DX)


def test_dp_straight_line_when_gradient_is_a_column():
    # one bright gradient column through apex and corner: the path sits on it
    G = np.zeros((8, 5))
    G[:, 2] = 200.0
    p = DpParams()
    g = HalfImage(img=GrayImage(G), apex_col=2, corner_col=2, side="right", frame_index=0)
    path = dp_backtrack(dp_forward(g, p), 2)
    assert np.all(path == 2)


def test_dp_params_validation():
    with pytest.raises(ValueError):
        DpParams(fg=0.5)
    with pytest.raises(ValueError):
        DpParams(fdx=-1.0)
    with pytest.raises(ValueError):
        DpParams(DX=0)


def test_dp_backtrack_bad_corner():
    G = np.zeros((4, 4))
    g = HalfImage(img=GrayImage(G), apex_col=0, corner_col=0, side="left", frame_index=0)
    state = dp_forward(g, DpParams())
    with pytest.raises(ValueError):
        dp_backtrack(state, 9)


def test_partition_ventricle_geometry():
    frame = GrayImage(np.zeros((100, 100)))
    anchors = AnchorSet(PointF(30, 80), PointF(70, 82), PointF(50, 20), 0)
    left, right = partition_ventricle(frame, anchors, margin=10)
    assert left.side == "left" and right.side == "right"
    # halves span apex row to corner row
    assert left.img.height == 80 - 20 + 1
    assert right.img.height == 82 - 20 + 1
    # anchors map back to frame coordinates
    assert left.origin[0] + left.apex_col == 50
    assert left.origin[0] + left.corner_col == 30
    assert right.origin[0] + right.corner_col == 70


def test_partition_ventricle_degenerate():
    frame = GrayImage(np.zeros((100, 100)))
    anchors = AnchorSet(PointF(30, 80), PointF(70, 82), PointF(50, 20), 0)
    anchors.apex = PointF(50, 90)  # below the corners, bypassing __post_init__
    with pytest.raises(DegenerateGeometry):
        partition_ventricle(frame, anchors)


def test_initial_contour_on_phantom():
    clip, gt = phantom(seed=0, sigma=6.0)
    g = gt.anchors[0]
    anchors = AnchorSet(g.septal, g.lateral, g.apex, 0)
    c = initial_contour(clip.frames[0], anchors, DpParams())
    assert c.kind == "initial"
    # endpoints exactly at the valve corners
    assert tuple(c.points[0]) == tuple(g.septal)
    assert tuple(c.points[-1]) == tuple(g.lateral)
    # the path passes near the apex
    d = np.hypot(c.points[:, 0] - g.apex.x, c.points[:, 1] - g.apex.y)
    assert d.min() <= 4.0
