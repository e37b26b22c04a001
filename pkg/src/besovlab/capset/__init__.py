"""Perimeters, capacities and capacitary norms of geometric sets."""

from .capacity import (
    CapacityBound,
    CapacityFamilyConfig,
    GoldenSection,
    GridScan,
    Linear,
    SmoothPoly,
    UnresolvedScale,
    besov_capacity_upper,
    capacity_family,
    mollified_indicator,
)
from .choquet import capacity_distribution, choquet_lorentz_norm
from .netrusov import netrusov_upper
from .perimeter import (
    DivergentPerimeter,
    MCImportance,
    PerimeterEstimate,
    PerimeterMCConfig,
    RadialExact,
    fractional_perimeter,
)

__all__ = [
    "CapacityBound",
    "CapacityFamilyConfig",
    "GoldenSection",
    "GridScan",
    "Linear",
    "SmoothPoly",
    "UnresolvedScale",
    "besov_capacity_upper",
    "capacity_family",
    "mollified_indicator",
    "capacity_distribution",
    "choquet_lorentz_norm",
    "netrusov_upper",
    "DivergentPerimeter",
    "MCImportance",
    "PerimeterEstimate",
    "PerimeterMCConfig",
    "RadialExact",
    "fractional_perimeter",
]
