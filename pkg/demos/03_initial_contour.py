"""Dynamic-programming initial contour on one frame.

The frame is split into left and right halves between the apex row and the
corner rows; per half, a row-by-row DP on the gradient image rewards strong
gradients, penalizes lateral jumps and curvature, and is forced through the
apex by a large bonus. The two backtracked paths join into the contour.
"""

from pathlib import Path

from lvseg import DpParams, PhantomSpec, generate_phantom, initial_contour, percent_error
from lvseg.anatomy import AnchorSet

from _overlay import overlay

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

clip, gt = generate_phantom(PhantomSpec(seed=7, speckle_sigma=6.0))
g0 = gt.anchors[0]
anchors = AnchorSet(g0.septal, g0.lateral, g0.apex, 0)

contour = initial_contour(clip.frames[0], anchors, DpParams())
err = percent_error(contour, gt.contours[0], clip.width, clip.height)
print(f"initial contour: {contour.n_points} points, percent error {err:.4f}")

img = overlay(
    clip.frames[0],
    contours={"manual": gt.contours[0].points, "initial": contour.points},
    points={"septal": anchors.septal, "lateral": anchors.lateral, "apex": anchors.apex},
)
img.save(out_dir / "03_initial_contour.png")
print(f"wrote {out_dir / '03_initial_contour.png'}")
