"""Left-ventricle segmentation from anatomical markers.

Five-step pipeline: mitral-valve corner detection, apex detection from
temporal block correlation, dual-block SAD corner tracking, a dynamic-
programming initial contour, and localized region-based active-contour
refinement. Includes a synthetic phantom generator with ground truth and
the percent non-overlap error metric.
"""

from .anatomy import (
    AnchorSet,
    ApexDetectParams,
    ValveDetectParams,
    detect_apex,
    detect_corner,
    detect_valve,
    detect_valve_pixels,
    find_wall_hits,
)
from .dpcontour import DpParams, DpState, HalfImage, dp_backtrack, dp_forward, initial_contour, partition_ventricle
from .evaluation import GroundTruth, PhantomSpec, evaluate_clip, generate_phantom, percent_error
from .imgcore import (
    Contour,
    GrayClip,
    GrayImage,
    PointF,
    gradient_image,
    load_clip,
    polyline_smooth,
    rasterize_polygon,
    save_clip,
    smooth_image,
)
from .pipeline import PipelineConfig, SegmentationResult, detect_anchors, segment_clip
from .snake import SnakeParams, evolve, local_means
from .tracking import BlockPair, TrackParams, combined_sad, sad, track_corners, track_step

__version__ = "0.1.0"
