"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest -v -s tests/test_acceptance.py` to see the per-criterion
lines inline; under plain `pytest -v` each test's own outcome is the line.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from lvseg import (
    ApexDetectParams,
    Contour,
    PhantomSpec,
    PipelineConfig,
    SnakeParams,
    TrackParams,
    ValveDetectParams,
    detect_apex,
    detect_valve,
    evaluate_clip,
    evolve,
    generate_phantom,
    percent_error,
    segment_clip,
)
from lvseg.anatomy import AnchorSet
from lvseg.dpcontour import dp_backtrack, dp_forward, path_cost
from lvseg.errors import NoApexFound, ValveNotFound
from lvseg.imgcore import GrayClip, GrayImage, PointF
from lvseg.tracking import combined_sad, extract_blocks, track_step

from .conftest import phantom
from .dp_oracle import enumerate_min_cost, random_case


def report(n: int, ok: bool, detail: str) -> None:
    print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {n} failed: {detail}"


def test_criterion_1_dp_oracle_equivalence():
    rng = np.random.default_rng(2026)
    n_cases = 200
    t0 = time.time()
    mismatches = 0
    for _ in range(n_cases):
        g, p = random_case(rng)
        path = dp_backtrack(dp_forward(g, p), g.corner_col)
        if path_cost(path, g, p) != enumerate_min_cost(g, p):
            mismatches += 1
    elapsed = time.time() - t0
    ok = mismatches == 0 and elapsed < 30.0
    report(1, ok, f"{n_cases} cases, {mismatches} mismatches, {elapsed:.1f}s")


def test_criterion_2_sad_tracking_exactness():
    rng = np.random.default_rng(7)
    p = TrackParams()
    pos = PointF(60, 60)
    exact_fail = 0
    noisy_fail = 0
    for _ in range(50):
        base = rng.uniform(0, 255, size=(120, 120))
        ref = extract_blocks(GrayImage(base), pos, p)
        k = int(rng.integers(-p.search_radius, p.search_radius + 1))
        l = int(rng.integers(-p.search_radius, p.search_radius + 1))
        shifted = np.roll(np.roll(base, l, axis=0), k, axis=1)
        new_pos, _, _ = track_step(ref, GrayImage(shifted), pos, p)
        if (new_pos.x - pos.x, new_pos.y - pos.y) != (k, l):
            exact_fail += 1
        noisy = np.clip(shifted + rng.normal(0, 5, size=shifted.shape), 0, 255)
        noisy_pos, _, _ = track_step(ref, GrayImage(noisy), pos, p)
        if max(abs(noisy_pos.x - pos.x - k), abs(noisy_pos.y - pos.y - l)) > 1:
            noisy_fail += 1
    arithmetic_ok = (
        combined_sad(3.0, 5.0) == 45.0
        and combined_sad(2.5, 4.0) == 25.0
        and combined_sad(0.0, 9.0) == 0.0
    )
    ok = exact_fail == 0 and noisy_fail == 0 and arithmetic_ok
    report(
        2,
        ok,
        f"50 patches: {exact_fail} exact misses, {noisy_fail} noisy >1px, "
        f"arithmetic {'ok' if arithmetic_ok else 'bad'}",
    )


def test_criterion_3_phantom_end_to_end():
    cfg = PipelineConfig()
    init_means, final_means = [], []
    for seed in range(20):
        clip, gt = phantom(seed=seed, sigma=6.0)
        result = segment_clip(clip, cfg)
        rep = evaluate_clip(result, gt)
        init_means.append(rep["initial_mean_pct_error"])
        final_means.append(rep["mean_pct_error"])
    worst = max(final_means)
    degrade = max(f - i for f, i in zip(final_means, init_means))
    ok = worst <= 0.15 and degrade <= 0.01
    report(
        3,
        ok,
        f"20 phantoms: worst clip mean {worst:.4f} (limit 0.15), "
        f"max refined-minus-initial {degrade:+.4f} (limit +0.01)",
    )


def test_criterion_4_anchor_detection():
    vp = ValveDetectParams()
    ap = ApexDetectParams()
    worst_corner = worst_apex = 0.0
    for seed in range(5):
        for sigma in (0.0, 2.0, 6.0, 10.0):
            clip, gt = phantom(seed=seed, sigma=sigma)
            g = gt.anchors[0]
            septal, lateral = detect_valve(clip.frames[0], vp)
            endo, _ = detect_apex(clip, 0, septal, lateral, ap)
            worst_corner = max(
                worst_corner,
                float(np.hypot(septal.x - g.septal.x, septal.y - g.septal.y)),
                float(np.hypot(lateral.x - g.lateral.x, lateral.y - g.lateral.y)),
            )
            worst_apex = max(
                worst_apex, float(np.hypot(endo.x - g.apex.x, endo.y - g.apex.y))
            )
    black = GrayImage(np.zeros((80, 80)))
    with pytest.raises(ValveNotFound):
        detect_valve(black, vp)
    black_clip = GrayClip(frames=[black] * 4, frame_rate=30.0, pixel_spacing=1.0)
    with pytest.raises(NoApexFound):
        detect_apex(black_clip, 0, PointF(30, 60), PointF(50, 60), ap)
    ok = worst_corner <= 4.0 and worst_apex <= 5.0
    report(
        4,
        ok,
        f"20 phantoms (sigma<=10): worst corner {worst_corner:.2f}px (limit 4), "
        f"worst apex {worst_apex:.2f}px (limit 5); black-frame errors raised",
    )


def test_criterion_5_metric_exactness():
    def square(x0, y0, side):
        return Contour(
            np.array(
                [[x0, y0], [x0 + side, y0], [x0 + side, y0 + side], [x0, y0 + side]],
                dtype=float,
            ),
            0,
            kind="manual",
        )

    sq = square(1.5, 1.5, 10.0)
    identity = percent_error(sq, sq, 25, 25)
    shifted = percent_error(square(6.5, 1.5, 10.0), sq, 25, 25)
    nested = percent_error(square(3.5, 3.5, 6.0), sq, 25, 25)
    ok = identity == 0.0 and shifted == 1.0 and nested == 0.64
    report(5, ok, f"identity {identity}, shifted {shifted}, nested {nested}")


def test_criterion_6_snake_contracts():
    yy, xx = np.mgrid[0:100, 0:100]
    disk = (xx - 50) ** 2 + (yy - 45) ** 2 <= 20 * 20
    img = GrayImage(np.where(disk, 30.0, 200.0))
    ang = np.linspace(np.pi, 0, 41)
    pts = np.stack([50 + 27.0 * np.cos(ang), 45 - 27.0 * np.sin(ang)], axis=1)
    pts[0] = [30.0, 45.0]
    pts[-1] = [70.0, 45.0]
    init = Contour(pts, 0, kind="initial")
    anchors = AnchorSet(PointF(30.0, 45.0), PointF(70.0, 45.0), PointF(50.0, 25.0), 0)

    identity = evolve(img, init, anchors, SnakeParams(max_iters=0))
    identity_ok = np.array_equal(identity.points, init.points)

    p = SnakeParams(max_iters=300, convergence_tol=1e-3)
    out = evolve(img, init, anchors, p)
    d_sep = np.hypot(init.points[:, 0] - 30.0, init.points[:, 1] - 45.0)
    d_lat = np.hypot(init.points[:, 0] - 70.0, init.points[:, 1] - 45.0)
    clamped = (d_sep <= p.valve_clamp_radius) | (d_lat <= p.valve_clamp_radius)
    clamped[0] = clamped[-1] = True
    clamp_ok = np.array_equal(out.points[clamped], init.points[clamped])

    r = np.hypot(out.points[:, 0] - 50.0, out.points[:, 1] - 45.0)
    capture = float(np.abs(r - 20.0)[~clamped].max())
    ok = identity_ok and clamp_ok and capture <= 2.0
    report(
        6,
        ok,
        f"identity {'ok' if identity_ok else 'bad'}, clamp "
        f"{'bit-identical' if clamp_ok else 'moved'}, disk capture {capture:.2f}px (limit 2)",
    )


def test_criterion_7_determinism(tmp_path):
    spec = PhantomSpec(seed=4, speckle_sigma=6.0)
    cfg = PipelineConfig()
    paths = []
    for i in range(2):
        clip, _ = generate_phantom(spec)
        result = segment_clip(clip, cfg)
        path = tmp_path / f"seg{i}.json"
        result.save(path)
        paths.append(path)
    identical = paths[0].read_bytes() == paths[1].read_bytes()
    report(7, identical, f"two runs, byte-identical: {identical}")
