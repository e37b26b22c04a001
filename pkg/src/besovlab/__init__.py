"""Numerical checks of fractional Besov, Lorentz and capacitary inequalities.

The subpackages are importable on their own; the names below are the ones
most scripts need.
"""

from .besov import BesovQuadConfig, besov_seminorm, lp_norm
from .capset import (
    CapacityFamilyConfig,
    PerimeterMCConfig,
    besov_capacity_upper,
    choquet_lorentz_norm,
    fractional_perimeter,
    netrusov_upper,
)
from .core import (
    INFINITY,
    BesovParams,
    CorpusSpec,
    GridFunction,
    LorentzParams,
    dilate,
    digitize,
    make_corpus,
    superlevel_set,
)
from .geometry import AxisBox, Ball, DisjointUnion
from .lorentz import LebesgueVolume, RadialWeight, lorentz_norm, weak_norm
from .rearrange import rearrange, riesz_pairing, weighted_integral

__version__ = "0.1.0"

__all__ = [
    "BesovQuadConfig",
    "besov_seminorm",
    "lp_norm",
    "CapacityFamilyConfig",
    "PerimeterMCConfig",
    "besov_capacity_upper",
    "choquet_lorentz_norm",
    "fractional_perimeter",
    "netrusov_upper",
    "INFINITY",
    "BesovParams",
    "CorpusSpec",
    "GridFunction",
    "LorentzParams",
    "dilate",
    "digitize",
    "make_corpus",
    "superlevel_set",
    "AxisBox",
    "Ball",
    "DisjointUnion",
    "LebesgueVolume",
    "RadialWeight",
    "lorentz_norm",
    "weak_norm",
    "rearrange",
    "riesz_pairing",
    "weighted_integral",
]
