"""Symmetric decreasing rearrangement and radial weighted integrals.

Each superlevel set ``{|f| > t}`` is replaced by the origin-centred ball of
the same volume, with radii normalised by the unit-ball volume so that
``V(B_r) = omega_n r^n`` holds exactly. On a grid function the result is a
step profile whose shells carry the sample magnitudes in decreasing order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GridFunction
from .geometry import sphere_area, unit_ball_volume
from .lorentz import LebesgueVolume, LevelPartition, distribution_values, radial_cell_weights

__all__ = [
    "RadialProfile",
    "rearrange",
    "equimeasurable",
    "weighted_integral",
    "riesz_pairing",
    "profile_to_grid",
    "hardy_constant",
]


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Step function of ``|x|``: ``values[j]`` on ``radii[j] <= |x| < radii[j+1]``.

    ``radii[0] = 0`` and the last value (beyond the last radius) is 0.
    """

    dim: int
    radii: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float).copy()
        v = np.asarray(self.values, dtype=float).copy()
        if r.ndim != 1 or r.shape != v.shape or r.size == 0:
            raise ValueError("radii and values must be 1-D arrays of equal nonzero length")
        if r[0] != 0 or np.any(np.diff(r) <= 0):
            raise ValueError("radii must start at 0 and increase strictly")
        if np.any(v < 0) or np.any(np.diff(v) > 0) or v[-1] != 0:
            raise ValueError("values must be nonnegative, nonincreasing and end at 0")
        r.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v)

    @property
    def support_radius(self) -> float:
        return float(self.radii[-1])

    def __call__(self, r) -> np.ndarray:
        idx = np.searchsorted(self.radii, np.asarray(r, dtype=float), side="right") - 1
        return self.values[idx]

    def superlevel_volume(self, t) -> np.ndarray:
        """``V({f^# > t})`` for each ``t >= 0``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        # values are nonincreasing: the set {value > t} is the first run of shells
        count = np.sum(self.values[None, :] > t[:, None], axis=1)
        return unit_ball_volume(self.dim) * self.radii[count] ** self.dim

    def power(self, s: float) -> "RadialProfile":
        return RadialProfile(self.dim, self.radii, self.values**s)


def rearrange(f: GridFunction) -> RadialProfile:
    """Symmetric decreasing rearrangement of ``|f|``."""
    n = f.dim
    if f.is_zero():
        return RadialProfile(n, np.array([0.0]), np.array([0.0]))
    t = LevelPartition.grid_values(f).levels
    prev = np.concatenate([[0.0], t[:-1]])
    vols = distribution_values(f, prev, LebesgueVolume())
    radii = (vols / unit_ball_volume(n)) ** (1.0 / n)
    return RadialProfile(n, np.concatenate([[0.0], radii[::-1]]), np.concatenate([t[::-1], [0.0]]))


def equimeasurable(f: GridFunction, prof: RadialProfile) -> tuple[bool, float]:
    """Compare superlevel volumes of ``f`` and the profile at every level.

    Returns ``(ok, max_deviation)`` with ``ok`` meaning the deviation is at
    most one cell volume.
    """
    if f.dim != prof.dim:
        raise ValueError(f"dimension mismatch: function {f.dim}, profile {prof.dim}")
    levels = np.unique(np.concatenate([[0.0], np.abs(f.values).ravel(), prof.values]))
    v_f = distribution_values(f, levels, LebesgueVolume())
    v_p = prof.superlevel_volume(levels)
    dev = float(np.max(np.abs(v_f - v_p)))
    return dev <= f.cell_volume * (1 + 1e-9), dev


def _shell_weights(radii: np.ndarray, n: int, gamma: float) -> np.ndarray:
    """Integral of ``|x|^{-gamma}`` over each shell ``radii[j] <= |x| < radii[j+1]``."""
    e = n - gamma
    outer = np.concatenate([radii[1:], [radii[-1]]])
    return sphere_area(n) * (outer**e - radii**e) / e


def weighted_integral(g, s: float, gamma: float) -> float:
    """``int |g|^s |x|^{-gamma} dx`` for a grid function or a radial profile."""
    if not s > 0:
        raise ValueError(f"exponent must be positive, got {s}")
    if isinstance(g, RadialProfile):
        if gamma >= g.dim:
            raise ValueError(f"weight |x|^-gamma needs gamma < n = {g.dim}, got {gamma}")
        w = _shell_weights(g.radii, g.dim, gamma)
        return float(np.sum(g.values**s * w))
    return float(np.sum(np.abs(g.values) ** s * radial_cell_weights(g, gamma)))


def hardy_constant(n: int, p: float, beta: float) -> float:
    """``C`` in ``int (f^#)^p |x|^{-p beta} = C ||f||^p_{L^{np/(n-p beta), p}}``.

    Summation by parts turns the shell sum into
    ``|S^{n-1}|/(n - p beta) sum_j r_j^{n - p beta} (t_j^p - t_{j-1}^p)`` and
    ``r_j = (V_j/omega_n)^{1/n}`` with ``omega_n = |S^{n-1}|/n``.
    """
    area = sphere_area(n)
    e = n - p * beta
    return area / e * (n / area) ** (e / n)


def _profile_pairing(a: RadialProfile, b: RadialProfile) -> float:
    cuts = np.union1d(a.radii, b.radii)
    vals = a(cuts) * b(cuts)
    vol = unit_ball_volume(a.dim) * cuts**a.dim
    return float(np.sum(vals[:-1] * np.diff(vol)))


def riesz_pairing(f: GridFunction, g: GridFunction) -> tuple[float, float]:
    """``(int f g, int f^# g^#)``; the second is evaluated shell by shell."""
    if not f.same_grid(g):
        raise ValueError("riesz_pairing needs both functions on the same grid")
    direct = float(np.sum(f.values * g.values) * f.cell_volume)
    return direct, _profile_pairing(rearrange(f), rearrange(g))


def profile_to_grid(prof: RadialProfile, like: GridFunction) -> GridFunction:
    """Sample the profile at the cell centres of ``like``'s grid."""
    if prof.dim != like.dim:
        raise ValueError("dimension mismatch")
    return like.with_values(prof(like.radii()))
