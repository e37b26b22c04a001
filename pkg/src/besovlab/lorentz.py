"""Distribution functions and Lorentz norms over a content.

A content is a monotone set function evaluated on superlevel sets
``O_t = {|f| > t}``. Measures (Lebesgue volume, radial power weights) are
evaluated from sorted cumulative sums of per-cell weights; geometric
contents (capacity and Netrusov estimates) need the analytic set attached
to each superlevel set and are evaluated level by level with a cache.

With ``dt^{q0}`` read as ``q0 t^{q0-1} dt`` the Lorentz quasi-norm of a
function taking finitely many values is the exact finite sum

    sum_j nu(O_{t_{j-1}})^{q0/p0} (t_j^{q0} - t_{j-1}^{q0}),  t_0 = 0,

over its sorted distinct magnitudes ``t_1 < ... < t_m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .core import GridFunction, LevelSet, LorentzParams, support_level
from .geometry import GeometricSet, sphere_area, unit_ball_volume

__all__ = [
    "NotEvaluable",
    "Content",
    "LebesgueVolume",
    "RadialWeight",
    "CapacityEstimate",
    "NetrusovContent",
    "LevelPartition",
    "distribution_value",
    "distribution_values",
    "lorentz_norm",
    "weak_norm",
    "radial_cell_weights",
]


class NotEvaluable(ValueError):
    """The content cannot be evaluated on this superlevel set."""


# ---------------------------------------------------------------------------
# partitions

@dataclass(frozen=True, eq=False)
class LevelPartition:
    """Increasing positive levels ``t_1 < ... < t_m`` with ``t_m = max|f|``."""

    levels: np.ndarray
    scheme: str = "grid_values"

    def __post_init__(self):
        t = np.asarray(self.levels, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("a partition needs at least one level")
        if not np.all(t > 0) or not np.all(np.diff(t) > 0):
            raise ValueError("levels must be positive and strictly increasing")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "levels", t)

    @classmethod
    def grid_values(cls, f: GridFunction) -> "LevelPartition":
        """All distinct nonzero sample magnitudes; exact for grid functions."""
        mags = np.unique(np.abs(f.values))
        mags = mags[mags > 0]
        if not mags.size:
            raise ValueError("the zero function has no levels")
        return cls(mags, "grid_values")

    @classmethod
    def log_uniform(cls, f: GridFunction, m: int) -> "LevelPartition":
        """``m`` log-spaced levels from the smallest nonzero magnitude to the max.

        The induced sums are upper Darboux sums of the exact integral.
        """
        if m < 1:
            raise ValueError("m must be >= 1")
        mags = np.abs(f.values)
        nz = mags[mags > 0]
        if not nz.size:
            raise ValueError("the zero function has no levels")
        lo, hi = float(nz.min()), float(nz.max())
        levels = np.array([hi]) if m == 1 or lo == hi else np.unique(np.geomspace(lo, hi, m))
        levels[-1] = hi
        return cls(levels, f"log_uniform({m})")

    def check_covers(self, f: GridFunction) -> None:
        if self.levels[-1] < f.max_abs * (1 - 1e-15):
            raise ValueError("partition does not reach max|f|")


# ---------------------------------------------------------------------------
# contents

class Content:
    """Monotone set function on superlevel sets."""

    is_measure = False

    def cell_weights(self, f: GridFunction) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, level: LevelSet) -> float:
        raise NotImplementedError

    def label(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class LebesgueVolume(Content):
    is_measure = True

    def cell_weights(self, f):
        return np.full(f.shape, f.cell_volume)

    def evaluate(self, level):
        return level.volume

    def label(self):
        return "lebesgue"


_GAUSS = leggauss(3)


def _cell_integrals_1d(edges_lo: np.ndarray, h: float, gamma: float) -> np.ndarray:
    a, b = edges_lo, edges_lo + h

    def prim(x):
        return np.sign(x) * np.abs(x) ** (1 - gamma) / (1 - gamma)

    return prim(b) - prim(a)


def _tensor_rule(c: np.ndarray, h: float, gamma: float, sub: int) -> np.ndarray:
    """3-point Gauss-Legendre per axis on ``sub**n`` subcells of each cell."""
    n = c.shape[1]
    nodes, wts = _GAUSS
    hs = h / sub
    centres = (np.arange(sub) + 0.5) * hs - h / 2
    pts_1d = (centres[:, None] + 0.5 * hs * nodes[None, :]).ravel()
    w_1d = np.tile(wts, sub) * 0.5 * hs
    grids = np.meshgrid(*([pts_1d] * n), indexing="ij")
    offsets = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack(np.meshgrid(*([w_1d] * n), indexing="ij"), axis=-1), axis=-1).ravel()
    out = np.zeros(c.shape[0])
    for o, w in zip(offsets, weights):
        r = np.linalg.norm(c + o, axis=1)
        with np.errstate(divide="ignore"):
            out += w * np.where(r > 0, r, np.inf) ** (-gamma)
    return out


def radial_cell_weights(f: GridFunction, gamma: float) -> np.ndarray:
    """Integral of ``|x|^{-gamma}`` over every cell of ``f``'s grid.

    1-D cells use the exact antiderivative. In 2-D and 3-D the cell holding
    the origin gets the integral over the centred ball of equal volume and
    every other cell a 3-point Gauss-Legendre tensor rule, refined on
    subcells near the origin.
    """
    n, h = f.dim, f.spacing
    if gamma >= n:
        raise ValueError(f"weight |x|^-gamma needs gamma < n = {n}, got {gamma}")
    if gamma == 0:
        return np.full(f.shape, f.cell_volume)
    if n == 1:
        lo = f.axes()[0] - h / 2
        return _cell_integrals_1d(lo, h, gamma)
    c = f.centers().reshape(-1, n)
    out = _tensor_rule(c, h, gamma, 1)
    # cells next to the singularity: 8^n subcells
    near = np.max(np.abs(c), axis=1) < 2.5 * h
    if np.any(near):
        out[near] = _tensor_rule(c[near], h, gamma, 8)
    origin_cell = np.all(np.abs(c) < h / 2 + 1e-12 * h, axis=1)
    if np.any(origin_cell):
        # origin on a cell face or corner: the touching cells share one ball
        shared = int(origin_cell.sum())
        rho = (shared * h**n / unit_ball_volume(n)) ** (1.0 / n)
        ball = sphere_area(n) * rho ** (n - gamma) / (n - gamma)
        out[origin_cell] = ball / shared
    return out.reshape(f.shape)


@dataclass(frozen=True)
class RadialWeight(Content):
    """The measure ``|x|^{-gamma} dx``."""

    gamma: float

    is_measure = True

    def __post_init__(self):
        if not math.isfinite(self.gamma):
            raise ValueError("gamma must be finite")

    def cell_weights(self, f):
        return radial_cell_weights(f, self.gamma)

    def evaluate(self, level):
        ref = GridFunction(np.zeros(level.mask.shape), level.spacing, level.origin)
        return float(np.sum(radial_cell_weights(ref, self.gamma)[level.mask]))

    def label(self):
        return f"radial_weight({self.gamma:g})"


def _require_geometry(level: LevelSet) -> GeometricSet:
    if level.geometry is None:
        raise NotEvaluable(
            f"superlevel set at t={level.t:.6g} is not a recognizable ball/box union; "
            "use a radial corpus entry")
    return level.geometry


@dataclass(frozen=True, eq=False)
class CapacityEstimate(Content):
    """Upper estimate of the Besov capacity of each superlevel set."""

    params: object
    family: object = None
    quad: object = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def value(self, K: GeometricSet) -> float:
        from .capset.capacity import besov_capacity_upper

        key = K.key()
        if key not in self._cache:
            self._cache[key] = besov_capacity_upper(K, self.params, self.family, self.quad)[0]
        return self._cache[key]

    def evaluate(self, level):
        if level.is_empty:
            return 0.0
        return self.value(_require_geometry(level))

    def label(self):
        return f"capacity({self.params.label()})"


@dataclass(frozen=True, eq=False)
class NetrusovContent(Content):
    d: float
    theta: float
    eps: float = math.inf
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not (self.d > 0 and self.theta > 0 and self.eps > 0):
            raise ValueError("Netrusov content needs d, theta, eps > 0")

    def value(self, E: GeometricSet) -> float:
        from .capset.netrusov import netrusov_upper

        key = E.key()
        if key not in self._cache:
            self._cache[key] = netrusov_upper(E, self.d, self.theta, self.eps)
        return self._cache[key]

    def evaluate(self, level):
        if level.is_empty:
            return 0.0
        return self.value(_require_geometry(level))

    def label(self):
        return f"netrusov(d={self.d:g},theta={self.theta:g},eps={self.eps:g})"


# ---------------------------------------------------------------------------
# distribution function and norms

def _measure_distribution(f: GridFunction, nu: Content, thresholds: np.ndarray) -> np.ndarray:
    mags = np.abs(f.values).ravel()
    w = nu.cell_weights(f).ravel()
    order = np.argsort(mags, kind="stable")
    mags, w = mags[order], w[order]
    tail = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])
    idx = np.searchsorted(mags, thresholds, side="right")
    return tail[idx]


def distribution_values(f: GridFunction, thresholds, nu: Content) -> np.ndarray:
    """``nu(O_t(f))`` for every ``t`` in ``thresholds`` (``t >= 0``)."""
    t = np.atleast_1d(np.asarray(thresholds, dtype=float))
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValueError("thresholds must be finite and nonnegative")
    if nu.is_measure:
        return _measure_distribution(f, nu, t)
    out = np.empty(t.size)
    for i, ti in enumerate(t):
        if ti >= f.max_abs:
            out[i] = 0.0
            continue
        out[i] = nu.evaluate(support_level(f, ti))
    return out


def distribution_value(f: GridFunction, t: float, nu: Content) -> float:
    if not t > 0:
        raise ValueError(f"threshold must be positive, got {t}")
    return float(distribution_values(f, [t], nu)[0])


def _level_table(f: GridFunction, nu: Content, part: LevelPartition | None):
    part = LevelPartition.grid_values(f) if part is None else part
    part.check_covers(f)
    t = np.asarray(part.levels)
    prev = np.concatenate([[0.0], t[:-1]])
    nu_vals = distribution_values(f, prev, nu)
    return t, prev, nu_vals


def lorentz_norm(f: GridFunction, lp: LorentzParams, nu: Content,
                 part: LevelPartition | None = None) -> float:
    """``(int_0^inf nu(O_t)^{q0/p0} dt^{q0})^{1/q0}`` on the level partition."""
    if lp.weak:
        raise ValueError("q0 = INFINITY: use weak_norm")
    if f.is_zero():
        return 0.0
    t, prev, nu_vals = _level_table(f, nu, part)
    p0, q0 = lp.p0, lp.q0
    total = float(np.sum(nu_vals ** (q0 / p0) * (t**q0 - prev**q0)))
    return total ** (1.0 / q0)


def weak_norm(f: GridFunction, p0: float, nu: Content, part: LevelPartition | None = None) -> float:
    """``sup_s s nu(O_s)^{1/p0}``, attained as ``s`` rises to a sample magnitude."""
    if not p0 > 0:
        raise ValueError(f"p0 must be positive, got {p0}")
    if f.is_zero():
        return 0.0
    t, _, nu_vals = _level_table(f, nu, part)
    return float(np.max(t * nu_vals ** (1.0 / p0)))
