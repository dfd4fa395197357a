"""Exact-repair regenerating codes: tradeoff bounds and concrete small-to-big codes."""

from .exactmath import binomial, hypergeom_weight
from .tradeoff import (
    InfeasibleError,
    ParameterError,
    Provenance,
    Region,
    SmallCode,
    SystemParams,
    TradeoffPoint,
    baseline_point,
    baseline_region,
    construction1_point,
    construction2_file_size,
    construction2_point,
    functional_capacity,
    hull_vertices,
    inner_bound_region,
    match_small_code,
    mbr_point,
    min_functional_gamma,
    msr_point,
    small_code_bandwidth,
    space_sharing_curve,
    theorem1_region,
    theorem2_region,
)

__version__ = "0.1.0"
