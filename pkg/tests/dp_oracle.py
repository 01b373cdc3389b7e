"""Exhaustive minimum-cost-path oracle for the DP contour stage.

Enumerates every column sequence ending at the corner column with per-row
steps bounded by DX, fully vectorized, and scores each path with the same
cost terms the DP accumulates. All parameter draws used against this oracle
are dyadic rationals so both sides compute exact binary floats and equality
can be asserted without tolerance.
"""

from __future__ import annotations

import numpy as np

from lvseg.dpcontour import DpParams, HalfImage


def enumerate_min_cost(g: HalfImage, p: DpParams) -> float:
    G = g.img.data
    n_rows, n_cols = G.shape
    steps = np.arange(-(p.DX - 1), p.DX)
    grids = np.meshgrid(*([steps] * (n_rows - 1)), indexing="ij")
    # deltas[k, j] is the column change from row j+1 up to row j for path k
    deltas = np.stack([a.ravel() for a in grids], axis=1)
    # path column per row, accumulated from the fixed corner at the last row
    paths = np.empty((deltas.shape[0], n_rows), dtype=np.int64)
    paths[:, -1] = g.corner_col
    paths[:, :-1] = g.corner_col + deltas[:, ::-1].cumsum(axis=1)[:, ::-1]
    valid = ((paths >= 0) & (paths < n_cols)).all(axis=1)
    paths = paths[valid]
    if paths.size == 0:
        return float("inf")

    rows = np.arange(n_rows)
    cost = (p.fg * G[rows, paths]).sum(axis=1)
    cost += np.where(paths[:, 0] == g.apex_col, p.apex_bonus, 0.0)
    d1 = np.diff(paths, axis=1)
    cost += p.fdx * np.abs(d1).sum(axis=1)
    if n_rows >= 3:
        d2 = paths[:, 2:] - 2 * paths[:, 1:-1] + paths[:, :-2]
        cost += p.fd2x * np.abs(d2).sum(axis=1)
    return float(cost.min())


def dyadic(rng: np.random.Generator, lo_eighths: int, hi_eighths: int) -> float:
    """Random multiple of 1/8; exact in binary floating point."""
    return int(rng.integers(lo_eighths, hi_eighths + 1)) / 8.0


def random_case(rng: np.random.Generator) -> tuple[HalfImage, DpParams]:
    from lvseg.imgcore import GrayImage

    n_rows = int(rng.integers(3, 9))
    n_cols = int(rng.integers(2, 9))
    G = rng.integers(0, 256, size=(n_rows, n_cols)).astype(float)
    p = DpParams(
        fg=-dyadic(rng, 4, 24),  # [-3, -0.5]
        fdx=dyadic(rng, 4, 32),  # [0.5, 4]
        fd2x=dyadic(rng, 0, 32),  # [0, 4]
        DX=int(rng.integers(1, 4)),
        apex_bonus=-1.0e6,
    )
    g = HalfImage(
        img=GrayImage(G),
        apex_col=int(rng.integers(0, n_cols)),
        corner_col=int(rng.integers(0, n_cols)),
        side="left",
        frame_index=0,
    )
    return g, p
