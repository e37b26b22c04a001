"""Upper bounds for the Besov capacity through the mollified indicators

    f_eps(x) = phi(dist(x, K) / eps),   phi(0) = 1,  phi(u) = 0 for u >= 1.

Every ``f_eps`` equals 1 on ``K`` so its seminorm to the power ``p`` bounds
the capacity from above; the bound is minimised over ``eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from ..besov import BesovQuadConfig, besov_seminorm
from ..core import BesovParams, GridFunction
from ..geometry import GeometricSet, normalized

__all__ = [
    "Linear",
    "SmoothPoly",
    "GridScan",
    "GoldenSection",
    "CapacityFamilyConfig",
    "CapacityBound",
    "UnresolvedScale",
    "mollified_indicator",
    "capacity_family",
    "besov_capacity_upper",
]


class UnresolvedScale(ValueError):
    """The grid cannot resolve the requested mollification width."""


@dataclass(frozen=True)
class Linear:
    """``phi(u) = 1 - u``."""

    def __call__(self, u):
        return np.clip(1.0 - u, 0.0, 1.0)


@dataclass(frozen=True)
class SmoothPoly:
    """``1 - smoothstep`` of degree 3 or 5."""

    degree: int = 3

    def __post_init__(self):
        if self.degree not in (3, 5):
            raise ValueError(f"SmoothPoly degree must be 3 or 5, got {self.degree}")

    def __call__(self, u):
        u = np.clip(u, 0.0, 1.0)
        if self.degree == 3:
            s = u * u * (3 - 2 * u)
        else:
            s = u**3 * (u * (6 * u - 15) + 10)
        return 1.0 - s


@dataclass(frozen=True)
class GridScan:
    pass


@dataclass(frozen=True)
class GoldenSection:
    """Bounded scalar search over ``log eps`` (scipy's bounded Brent method)."""

    tolerance: float = 0.05


DEFAULT_EPS = tuple(2.0 ** -np.arange(1, 7))


@dataclass(frozen=True)
class CapacityFamilyConfig:
    """Mollifier family and optimiser.

    ``resolution`` is cells per unit length. With ``relative=True`` both
    ``eps`` and ``resolution`` are measured in units of ``K.scale_length``
    and results are reused across translates and dilates of one shape via
    ``C(L K0) = L^{n - p beta} C(K0)``.
    """

    eps_grid: tuple = DEFAULT_EPS
    profile: Linear | SmoothPoly = field(default_factory=Linear)
    optimizer: GridScan | GoldenSection = field(default_factory=GridScan)
    resolution: int = 128
    relative: bool = False

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps_grid)
        if not eps:
            raise ValueError("eps_grid must be nonempty")
        if any(not 0 < e < 1 for e in eps):
            raise ValueError("eps values must lie in (0, 1)")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("eps_grid must be strictly decreasing")
        if self.resolution < 4:
            raise ValueError("resolution must be >= 4")
        object.__setattr__(self, "eps_grid", eps)

    @property
    def spacing(self) -> float:
        return 1.0 / self.resolution

    def check_resolvable(self, eps: float, unit: float = 1.0) -> None:
        h = unit * self.spacing
        if eps * unit < 2 * h * (1 - 1e-12):
            need = math.ceil(2.0 / eps)
            raise UnresolvedScale(
                f"eps = {eps:.6g} needs at least 2 cells across the transition; "
                f"resolution {self.resolution} is too coarse, need >= {need}")


class CapacityBound(NamedTuple):
    value: float
    eps: float | None


def mollified_indicator(K: GeometricSet, eps: float, profile, spacing: float) -> GridFunction:
    """Sample ``phi(dist(x, K)/eps)`` on cells whose edges align with ``K``'s lower corner."""
    lo, hi = K.bounds()
    reach = eps + 2 * spacing
    i0 = np.floor(-reach / spacing).astype(int) - 1
    i1 = np.ceil((hi - lo + reach) / spacing).astype(int) + 1
    axes = [lo[a] + spacing * (np.arange(i0, i1[a]) + 0.5) for a in range(K.dim)]
    x = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    d = K.distance(x.reshape(-1, K.dim)).reshape(x.shape[:-1])
    origin = np.array([ax[0] for ax in axes])
    return GridFunction(profile(d / eps), spacing, origin)


_CACHE: dict = {}


def _norm_at(K: GeometricSet, eps: float, params: BesovParams, fam: CapacityFamilyConfig,
             quad: BesovQuadConfig) -> float:
    key = (K.key(), round(eps, 15), params, fam.profile, fam.resolution, quad)
    if key not in _CACHE:
        f = mollified_indicator(K, eps, fam.profile, fam.spacing)
        _CACHE[key] = besov_seminorm(f, params.with_dim(K.dim), quad)
    return _CACHE[key]


def capacity_family(K: GeometricSet, params: BesovParams, fam: CapacityFamilyConfig | None = None,
                    quad: BesovQuadConfig | None = None) -> list[tuple[float, float]]:
    """``[(eps, ||f_eps||), ...]`` over ``fam.eps_grid`` in absolute units."""
    fam = CapacityFamilyConfig() if fam is None else fam
    quad = BesovQuadConfig() if quad is None else quad
    if K.is_empty:
        return [(e, 0.0) for e in fam.eps_grid]
    if fam.relative:
        K0, _, L = normalized(K)
        scale = L ** ((K.dim - params.p * params.beta) / params.p)
        out = []
        for e in fam.eps_grid:
            fam.check_resolvable(e)
            out.append((e * L, scale * _norm_at(K0, e, params, fam, quad)))
        return out
    for e in fam.eps_grid:
        fam.check_resolvable(e)
    return [(e, _norm_at(K, e, params, fam, quad)) for e in fam.eps_grid]


def besov_capacity_upper(K: GeometricSet, params: BesovParams,
                         fam: CapacityFamilyConfig | None = None,
                         quad: BesovQuadConfig | None = None) -> CapacityBound:
    """``min_eps ||f_eps||^p``: an upper bound on the capacity of ``K``.

    Returns ``(value, argmin eps)``; ``eps`` is in absolute units. An empty
    ``K`` gives ``(0, None)`` since the zero function is admissible.
    """
    fam = CapacityFamilyConfig() if fam is None else fam
    quad = BesovQuadConfig() if quad is None else quad
    if K.is_empty:
        return CapacityBound(0.0, None)
    p = params.p
    trace = capacity_family(K, params, fam, quad)
    if isinstance(fam.optimizer, GoldenSection) and len(trace) > 1:
        K_eval, unit, scale = K, 1.0, 1.0
        if fam.relative:
            K_eval, _, unit = normalized(K)
            scale = unit ** ((K.dim - p * params.beta) / p)
        lo, hi = math.log(min(fam.eps_grid)), math.log(max(fam.eps_grid))
        res = minimize_scalar(
            lambda le: _norm_at(K_eval, math.exp(le), params, fam, quad),
            bounds=(lo, hi), method="bounded",
            options={"xatol": fam.optimizer.tolerance})
        trace.append((math.exp(res.x) * unit, scale * float(res.fun)))
    eps, norm = min(trace, key=lambda t: (t[1], -t[0]))
    return CapacityBound(norm**p, eps)
