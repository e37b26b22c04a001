"""Grid functions, parameter types, the test corpus and superlevel sets.

Samples are cell averages of a piecewise-constant function: sample ``i`` sits
at the cell centre ``origin + i * spacing`` and every integral in the package
is the midpoint rule on these cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .geometry import (
    AxisBox,
    Ball,
    DisjointUnion,
    GeometricSet,
    unit_ball_volume,
)

__all__ = [
    "GridFunction",
    "BesovParams",
    "LorentzParams",
    "CorpusSpec",
    "LevelSet",
    "CORPUS_CATALOG",
    "RADIAL_ENTRIES",
    "make_corpus",
    "corpus_function",
    "dilate",
    "digitize",
    "superlevel_set",
    "INFINITY",
]

INFINITY = math.inf


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Compactly supported samples on a uniform grid in R^n, n <= 3.

    The outermost layer of cells must be zero so that shifted copies and
    finite differences never need an extension rule.
    """

    values: np.ndarray
    spacing: float
    origin: np.ndarray = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.ndim not in (1, 2, 3):
            raise ValueError(f"grid dimension must be 1, 2 or 3, got {v.ndim}")
        if min(v.shape) < 3:
            raise ValueError("grid needs at least 3 cells per axis")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        for ax in range(v.ndim):
            if np.any(np.take(v, 0, axis=ax)) or np.any(np.take(v, -1, axis=ax)):
                raise ValueError("nonzero samples on the grid boundary; pad with zeros")
        o = np.zeros(v.ndim) if self.origin is None else np.atleast_1d(
            np.asarray(self.origin, dtype=float)).copy()
        if o.shape != (v.ndim,):
            raise ValueError("origin must have one coordinate per axis")
        v.setflags(write=False)
        o.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def axes(self) -> list[np.ndarray]:
        return [self.origin[i] + self.spacing * np.arange(n) for i, n in enumerate(self.shape)]

    def centers(self) -> np.ndarray:
        """Cell centres as an array of shape ``(*shape, n)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.centers(), axis=-1)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def same_grid(self, other: "GridFunction") -> bool:
        return (self.shape == other.shape and self.spacing == other.spacing
                and np.array_equal(self.origin, other.origin))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(values, self.spacing, self.origin)

    def scaled(self, c: float) -> "GridFunction":
        return self.with_values(c * self.values)

    def support_box(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Index bounds ``(lo, hi)`` (inclusive) of the nonzero samples."""
        nz = np.nonzero(self.values)
        if not nz[0].size:
            return None
        return np.array([a.min() for a in nz]), np.array([a.max() for a in nz])

    def trimmed(self) -> "GridFunction":
        """Crop to the support plus one zero layer."""
        box = self.support_box()
        if box is None:
            return GridFunction(np.zeros((3,) * self.dim), self.spacing, self.origin)
        lo, hi = box[0] - 1, box[1] + 1
        sl = tuple(slice(a, b + 1) for a, b in zip(lo, hi))
        return GridFunction(self.values[sl], self.spacing, self.origin + lo * self.spacing)

    def __repr__(self):
        return (f"GridFunction(dim={self.dim}, shape={self.shape}, "
                f"spacing={self.spacing:.6g}, max={self.max_abs:.6g})")


@dataclass(frozen=True)
class BesovParams:
    """Smoothness ``beta``, integrability ``p`` and ``q`` in dimension ``dim``.

    Accepted regimes::

        A: 0 < beta < n, 1 <= p < n/beta, 0 < q < inf
        B: 0 < beta < 1, n/(n+beta) < p = q < 1

    Only ``beta < 2`` (difference order ``k <= 2``) is supported, and integer
    ``beta`` is rejected because the fractional part must lie in (0, 1).
    ``strict=False`` skips the regime test (the seminorm itself is defined for
    any ``p, q > 0``); the inequality chains only accept strict parameters.
    """

    beta: float
    p: float
    q: float
    dim: int = 1
    strict: bool = field(default=True, repr=False)
    k: int = field(init=False)

    def __post_init__(self):
        b, p, q, n = float(self.beta), float(self.p), float(self.q), int(self.dim)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "dim", n)
        if n not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {n}")
        if not all(math.isfinite(v) for v in (b, p, q)):
            raise ValueError("beta, p, q must be finite")
        if b <= 0:
            raise ValueError(f"beta must be > 0, got {b}")
        if b == math.floor(b):
            raise ValueError(f"beta must not be an integer, got {b}")
        if b >= 2:
            raise ValueError(f"beta >= 2 (k >= 3) is not supported, got {b}")
        object.__setattr__(self, "k", 1 + math.floor(b))
        if q <= 0 or p <= 0:
            raise ValueError(f"p and q must be > 0, got p={p}, q={q}")
        if not self.strict:
            return
        if p >= 1:
            if b >= n:
                raise ValueError(f"regime A needs beta < n = {n}, got beta={b}")
            if p >= n / b:
                raise ValueError(f"regime A needs p < n/beta = {n / b:.6g}, got p={p}")
        else:
            if b >= 1:
                raise ValueError(f"regime B needs beta < 1, got beta={b}")
            if p != q:
                raise ValueError(f"regime B needs p = q, got p={p}, q={q}")
            if p <= n / (n + b):
                raise ValueError(
                    f"regime B needs p > n/(n+beta) = {n / (n + b):.6g}, got p={p}")

    @property
    def regime(self) -> str:
        if not self.strict:
            return "-"
        return "A" if self.p >= 1 else "B"

    @property
    def pq_max(self) -> float:
        return max(self.p, self.q)

    @property
    def sobolev_exponent(self) -> float:
        """np/(n - p beta)."""
        return self.dim * self.p / (self.dim - self.p * self.beta)

    def with_dim(self, n: int) -> "BesovParams":
        return BesovParams(self.beta, self.p, self.q, n, self.strict)

    def label(self) -> str:
        return f"beta={self.beta:g};p={self.p:g};q={self.q:g};k={self.k};n={self.dim}"


@dataclass(frozen=True)
class LorentzParams:
    p0: float
    q0: float = INFINITY

    def __post_init__(self):
        if not self.p0 > 0 or not math.isfinite(self.p0):
            raise ValueError(f"p0 must be positive and finite, got {self.p0}")
        if not self.q0 > 0:
            raise ValueError(f"q0 must be positive or INFINITY, got {self.q0}")

    @property
    def weak(self) -> bool:
        return math.isinf(self.q0)


# ---------------------------------------------------------------------------
# corpus

CORPUS_HALF_WIDTH = 2.5
PLATEAU_WIDTH = 0.05
TWO_BUMP_OFFSET = 1.25

CORPUS_CATALOG = {
    "bump": "exp(-1/(1-|x|^2)) on the unit ball; maximum 1/e at the origin",
    "tent": "max(0, 1-|x|), the radial cone / 1-D tent",
    "two_bump": "two disjoint radius-1 bumps at x1 = -1.25 and x1 = +1.25, "
                "rescaled to peak heights 1 and 0.5",
    "trunc_power": "max(0, 1-|x|)^a, default a = 2; written 'trunc_power:a' to set a > 1",
    "plateau": "1 on |x| <= 0.95, smoothstep down to 0 at |x| = 1 "
               "(smoothed indicator of the unit ball)",
}

RADIAL_ENTRIES = ("bump", "tent", "trunc_power", "plateau")


def _bump(r):
    out = np.zeros_like(r)
    inside = r < 1
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3 - 2 * u)


def corpus_function(name: str, x: np.ndarray) -> np.ndarray:
    """Evaluate a catalog entry at points ``x`` of shape ``(..., n)``."""
    base, _, arg = name.partition(":")
    r = np.linalg.norm(x, axis=-1)
    if base == "bump":
        return _bump(r)
    if base == "tent":
        return np.maximum(0.0, 1.0 - r)
    if base == "trunc_power":
        a = float(arg) if arg else 2.0
        if not a > 1:
            raise ValueError(f"trunc_power exponent must be > 1, got {a}")
        return np.maximum(0.0, 1.0 - r) ** a
    if base == "plateau":
        out = 1.0 - _smoothstep((r - (1 - PLATEAU_WIDTH)) / PLATEAU_WIDTH)
        out[r >= 1] = 0.0
        return out
    if base == "two_bump":
        shift = np.zeros(x.shape[-1])
        shift[0] = TWO_BUMP_OFFSET
        e = math.e
        return (e * _bump(np.linalg.norm(x + shift, axis=-1))
                + 0.5 * e * _bump(np.linalg.norm(x - shift, axis=-1)))
    raise ValueError(f"unknown corpus entry {name!r}; catalog: {sorted(CORPUS_CATALOG)}")


@dataclass(frozen=True)
class CorpusSpec:
    names: tuple[str, ...]
    dim: int = 1
    resolution: int = 64
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if int(self.resolution) != self.resolution or self.resolution < 16:
            raise ValueError(f"resolution must be an integer >= 16, got {self.resolution}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        for nm in self.names:
            if nm.partition(":")[0] not in CORPUS_CATALOG:
                raise ValueError(f"unknown corpus entry {nm!r}; catalog: {sorted(CORPUS_CATALOG)}")


def corpus_grid(dim: int, resolution: int) -> tuple[float, np.ndarray, tuple[int, ...]]:
    """Common grid: cell centres ``i/resolution`` for ``|i| <= 2.5*resolution``."""
    h = 1.0 / resolution
    m = int(round(CORPUS_HALF_WIDTH * resolution))
    return h, np.full(dim, -m * h), (2 * m + 1,) * dim


def make_corpus(spec: CorpusSpec) -> list[tuple[str, GridFunction]]:
    """Sample every requested catalog entry on the common corpus grid.

    All entries are closed-form, so the output depends only on
    ``(names, dim, resolution)``; the seed is carried for provenance.
    """
    h, origin, shape = corpus_grid(spec.dim, spec.resolution)
    axes = [origin[i] + h * np.arange(n) for i, n in enumerate(shape)]
    x = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return [(nm, GridFunction(corpus_function(nm, x), h, origin)) for nm in spec.names]


def digitize(E: GeometricSet, spacing: float, value: float = 1.0, pad: int = 2) -> GridFunction:
    """Indicator ``value * 1_E`` sampled at cell centres (open-set membership)."""
    lo, hi = E.bounds()
    i0 = np.floor(lo / spacing).astype(int) - pad
    i1 = np.ceil(hi / spacing).astype(int) + pad
    axes = [spacing * np.arange(a, b + 1) for a, b in zip(i0, i1)]
    x = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    inside = E.contains(x.reshape(-1, E.dim)).reshape(x.shape[:-1])
    return GridFunction(value * inside.astype(float), spacing, i0 * spacing)


def dilate(f: GridFunction, lam: float, spacing: float | None = None) -> GridFunction:
    """Sample ``x -> f(lam * x)``.

    By default the sample array is reused on a grid of spacing
    ``f.spacing / lam`` (exact: every new sample point maps onto an old one).
    With ``spacing`` given, the result is resampled onto that spacing with
    nearest-sample lookup into ``f``.
    """
    if not (lam > 0 and math.isfinite(lam)):
        raise ValueError(f"dilation factor must be positive, got {lam}")
    if spacing is None:
        return GridFunction(f.values, f.spacing / lam, f.origin / lam)
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    box = f.support_box()
    if box is None:
        return GridFunction(np.zeros((3,) * f.dim), spacing, np.zeros(f.dim))
    lo = (f.origin + (box[0] - 1) * f.spacing) / lam
    hi = (f.origin + (box[1] + 1) * f.spacing) / lam
    i0 = np.floor(lo / spacing).astype(int) - 1
    i1 = np.ceil(hi / spacing).astype(int) + 1
    axes = [spacing * np.arange(a, b + 1) for a, b in zip(i0, i1)]
    x = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    idx = np.rint((lam * x - f.origin) / f.spacing).astype(int)
    valid = np.all((idx >= 0) & (idx < np.array(f.shape)), axis=-1)
    idx = np.where(valid[..., None], idx, 0)
    vals = f.values[tuple(idx[..., i] for i in range(f.dim))] * valid
    for ax in range(f.dim):
        sl = [slice(None)] * f.dim
        sl[ax] = [0, -1]
        vals[tuple(sl)] = 0.0
    return GridFunction(vals, spacing, i0 * spacing)


# ---------------------------------------------------------------------------
# superlevel sets

@dataclass(frozen=True, eq=False)
class LevelSet:
    """Cells where ``|f| > t`` plus an optional analytic approximation."""

    mask: np.ndarray
    spacing: float
    origin: np.ndarray
    t: float
    geometry: GeometricSet | None = None

    @property
    def dim(self) -> int:
        return self.mask.ndim

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def volume(self) -> float:
        return self.count * self.spacing**self.dim

    @property
    def is_empty(self) -> bool:
        return self.count == 0


def _recognize_component(comp: np.ndarray, centers: np.ndarray, h: float):
    n = comp.ndim
    idx = np.nonzero(comp)
    lo = np.array([a.min() for a in idx])
    hi = np.array([a.max() for a in idx])
    count = idx[0].size
    full_block = count == int(np.prod(hi - lo + 1))
    pts = centers[idx]
    if n == 1 or full_block:
        lo_x = pts.min(axis=0) - h / 2
        hi_x = pts.max(axis=0) + h / 2
        if n == 1:
            return Ball(0.5 * (lo_x + hi_x), 0.5 * float(hi_x[0] - lo_x[0]))
        if full_block:
            return AxisBox(lo_x, hi_x)
    c = pts.mean(axis=0)
    r = (count * h**n / unit_ball_volume(n)) ** (1.0 / n)
    tol = h * math.sqrt(n)
    dist = np.linalg.norm(centers - c, axis=-1)
    if np.any(dist[comp] > r + tol):
        return None
    if np.any((dist <= r - tol) & ~comp):
        return None
    return Ball(c, r)


def recognize(mask: np.ndarray, spacing: float, origin: np.ndarray) -> GeometricSet | None:
    """Match each connected component to a digitized ball or box."""
    n = mask.ndim
    if not mask.any():
        return DisjointUnion((), n)
    labels, k = ndimage.label(mask, structure=ndimage.generate_binary_structure(n, n))
    axes = [origin[i] + spacing * np.arange(m) for i, m in enumerate(mask.shape)]
    centers = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    parts = []
    for j in range(1, k + 1):
        g = _recognize_component(labels == j, centers, spacing)
        if g is None:
            return None
        parts.append(g)
    if len(parts) == 1:
        return parts[0]
    try:
        return DisjointUnion(tuple(parts))
    except ValueError:
        return None


def superlevel_set(f: GridFunction, t: float, geometry: bool = True) -> LevelSet:
    """The cell set ``{|f| > t}``; ``geometry`` attaches a ball/box approximation."""
    if not t > 0:
        raise ValueError(f"threshold must be positive, got {t}")
    return support_level(f, t, geometry)


def support_level(f: GridFunction, t: float = 0.0, geometry: bool = True) -> LevelSet:
    """Like :func:`superlevel_set` but also accepts ``t = 0`` (the support)."""
    mask = np.abs(f.values) > t
    mask.setflags(write=False)
    geom = recognize(mask, f.spacing, f.origin) if geometry else None
    return LevelSet(mask, f.spacing, f.origin, float(t), geom)
