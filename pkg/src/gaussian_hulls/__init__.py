"""Normalized convex hulls of Gaussian samples: a line-supported sequence
whose hulls converge to any symmetric convex body, and the i.i.d. baseline
converging to the concentration ellipsoid."""

from .analysis import (
    compactness_violation_count,
    ellipsoid_support,
    gaussian_tail_exact,
    gumbel_center,
    mgf_constant,
    normalized_max_stat,
    tail_bound,
)
from .construction import (
    ConstructionSpec,
    PartitionScheme,
    build_spec,
    class_labels,
    direction_sequence,
    draw_sample,
    max_discrepancy_trace,
    normalizer_b,
    truncated_target,
)
from .geometry import (
    Ball,
    Ellipsoid,
    Polytope,
    ProbeSet,
    SupportSampled,
    UnsupportedRepresentation,
    excess_along_ray,
    hausdorff_estimate,
    merge_support,
    radial_gauge,
    support,
    support_values,
)
from .hull_engine import (
    Polygon2D,
    SupportAccumulator,
    exact_hausdorff_2d,
    exact_hull_2d,
    normalized_support,
    polygon_support,
    sup_error,
)

__version__ = "0.1.0"
