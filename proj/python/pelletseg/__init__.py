"""Star-convex pellet segmentation: targets, post-processing, sizing and metrics."""

from ._pelletseg import (
    CoverageError,
    EmptyInput,
    Error,
    FormatError,
    InvalidParameter,
    ShapeError,
    analyze_instances,
    boundary_distance,
    combined_loss,
    expand_labels,
    luminance_stats,
    match_instances,
    measure_instance,
    min_enclosing_circle,
    normalize_luminance,
    object_probability,
    one_hot_types,
    pixel_metrics,
    polygon_iou,
    postprocess,
    ray_directions,
    split_dataset,
    srgb_to_lab,
    star_distances,
    synth_scene,
    wasserstein2_1d,
)

CLASS_NAMES = ("background", "nice", "ugly", "big", "joint")

__version__ = "0.1.0"
