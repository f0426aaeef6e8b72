"""Mixed volumes of ellipsoids, Gaussian widths, and zero sets of random fields.

The library computes convex-geometric functionals of ellipsoids through
Gaussian determinant identities (mixed volumes, intrinsic volumes, mean
width, Sudakov widths of point sets), exact mixed discriminants with the
matching two-sided volume bounds, a planar support-function oracle, and
expected zero-set measures of Gaussian random fields with closed-form
kernels, validated by realization-level counting.  All Monte Carlo runs
are reproducible: a seed names a counter-based stream family, and results
are bit-identical for any thread count.
"""

from .discriminant import SymmetricTuple, barvinok_bounds, mixed_discriminant
from .errors import (
    DegenerateGradient,
    DegenerateVariance,
    DimensionMismatch,
    GridTooCoarse,
    IllConditionedEllipsoid,
    IllConditionedFit,
    MixvolError,
    NegativeDiscriminant,
    NonConvexBody,
    NonOrthonormalBasis,
    NotPositiveDefinite,
    NotSymmetric,
    NotUnitVector,
    OutOfRange,
    SingularTransform,
)
from .fields import (
    FieldSpec,
    KernelSpec,
    PolyAtom,
    Realization,
    Region,
    TrigAtom,
    count_zeros_1d,
    count_zeros_2d,
    covariance,
    expected_zero_measure,
    field_from_json,
    field_to_json,
    gradient_covariance,
    gradient_ellipsoids,
    level_length_2d,
    load_field,
    load_region,
    nodal_length_experiment,
    region_from_json,
    region_to_json,
    simulate_realization,
    zero_count_experiment_1d,
    zero_count_experiment_2d,
    zero_intensity,
)
from .geometry import (
    Ellipsoid,
    SPDMatrix,
    ball,
    ellipsoid_from_axes,
    ellipsoid_from_json,
    ellipsoid_to_json,
    falling_factorial,
    load_ellipsoids,
    make_spd,
    project_ellipsoid,
    support_function,
    transform_ellipsoid,
    unit_ball,
    unit_ball_volume,
)
from .planar import (
    MinkowskiFit,
    SupportBody2D,
    area_from_support,
    minkowski_poly_check,
    mixed_area_oracle,
)
from .sampling import (
    CHUNK,
    GaussianVectorSpec,
    MatrixEnsemble,
    MCEstimate,
    RngStream,
    chunked_mc_mean,
    expected_gram_volume,
    gram_volume,
    normal_quantile,
    sample_gaussian,
)
from .volumes import (
    MixedVolumeQuery,
    NormComparison,
    PointCloud,
    SudakovWidth,
    expected_norm,
    intrinsic_volume,
    mean_width,
    mixed_volume_full,
    mixed_volume_with_balls,
    sudakov_width,
)

__all__ = [
    "CHUNK",
    "DegenerateGradient",
    "DegenerateVariance",
    "DimensionMismatch",
    "Ellipsoid",
    "FieldSpec",
    "GaussianVectorSpec",
    "GridTooCoarse",
    "IllConditionedEllipsoid",
    "IllConditionedFit",
    "KernelSpec",
    "MCEstimate",
    "MatrixEnsemble",
    "MinkowskiFit",
    "MixedVolumeQuery",
    "MixvolError",
    "NegativeDiscriminant",
    "NonConvexBody",
    "NonOrthonormalBasis",
    "NormComparison",
    "NotPositiveDefinite",
    "NotSymmetric",
    "NotUnitVector",
    "OutOfRange",
    "PointCloud",
    "PolyAtom",
    "Realization",
    "Region",
    "RngStream",
    "SPDMatrix",
    "SingularTransform",
    "SudakovWidth",
    "SupportBody2D",
    "SymmetricTuple",
    "TrigAtom",
    "area_from_support",
    "ball",
    "barvinok_bounds",
    "chunked_mc_mean",
    "count_zeros_1d",
    "count_zeros_2d",
    "covariance",
    "ellipsoid_from_axes",
    "ellipsoid_from_json",
    "ellipsoid_to_json",
    "expected_gram_volume",
    "expected_norm",
    "expected_zero_measure",
    "falling_factorial",
    "field_from_json",
    "field_to_json",
    "gradient_covariance",
    "gradient_ellipsoids",
    "gram_volume",
    "intrinsic_volume",
    "level_length_2d",
    "load_ellipsoids",
    "load_field",
    "load_region",
    "make_spd",
    "mean_width",
    "minkowski_poly_check",
    "mixed_area_oracle",
    "mixed_discriminant",
    "mixed_volume_full",
    "mixed_volume_with_balls",
    "nodal_length_experiment",
    "normal_quantile",
    "project_ellipsoid",
    "region_from_json",
    "region_to_json",
    "sample_gaussian",
    "simulate_realization",
    "sudakov_width",
    "support_function",
    "transform_ellipsoid",
    "unit_ball",
    "unit_ball_volume",
    "zero_count_experiment_1d",
    "zero_count_experiment_2d",
    "zero_intensity",
]
