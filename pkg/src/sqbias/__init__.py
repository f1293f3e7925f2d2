"""Size, zero and square bias transformations with exact L1 distances and bounds."""

from .distmodel import (
    DiscreteDist,
    InvalidDistribution,
    MixtureDist,
    MomentSet,
    PiecewiseDensity,
    PreconditionError,
    abs_moment,
    affine,
    cdf,
    convolve,
    mixture,
    moments,
    point_mass,
    rademacher,
    raw_moment,
    standardize,
    support,
    uniform,
)
from .metrics import cf_distance_bound, l1_distance, sup_cdf_difference
from .transforms import (
    double_size_bias,
    size_bias,
    square_bias,
    uniform_product_square_bias,
    zero_bias,
    zero_bias_decomposition,
)

__version__ = "0.1.0"
