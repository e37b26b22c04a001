"""Analytic bounded sets: balls, axis-aligned boxes and finite disjoint unions.

All point arguments are arrays of shape ``(N, n)``; a single point may be
passed as shape ``(n,)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GeometricSet",
    "Ball",
    "AxisBox",
    "DisjointUnion",
    "sphere_area",
    "unit_ball_volume",
    "EMPTY",
]


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def unit_ball_volume(n: int) -> float:
    return sphere_area(n) / n


def _points(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1) if x.shape[0] == dim else x.reshape(-1, 1)
    if x.shape[1] != dim:
        raise ValueError(f"points have dimension {x.shape[1]}, set has {dim}")
    return x


class GeometricSet:
    """Common interface. Subclasses are immutable value objects."""

    dim: int

    @property
    def volume(self) -> float:
        raise NotImplementedError

    @property
    def members(self) -> tuple["GeometricSet", ...]:
        return (self,)

    def contains(self, x) -> np.ndarray:
        """Membership of the open set."""
        raise NotImplementedError

    def distance(self, x) -> np.ndarray:
        """Euclidean distance to the closure (zero inside)."""
        raise NotImplementedError

    def depth(self, x) -> np.ndarray:
        """Distance to the complement for points inside (zero outside)."""
        raise NotImplementedError

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def ray_interval(self, y, dirs) -> tuple[np.ndarray, np.ndarray]:
        """Entry/exit ray parameters of ``y + rho * dir`` through a convex set.

        Returns arrays of shape ``(N, M)``; empty intersections have
        ``enter >= exit``.
        """
        raise NotImplementedError

    def scaled(self, lam: float) -> "GeometricSet":
        raise NotImplementedError

    def translated(self, v) -> "GeometricSet":
        raise NotImplementedError

    @property
    def scale_length(self) -> float:
        """Circumradius-type length used to normalise the set."""
        lo, hi = self.bounds()
        return 0.5 * float(np.linalg.norm(hi - lo))

    @property
    def is_empty(self) -> bool:
        return False

    def key(self) -> tuple:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Ball(GeometricSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float)).copy()
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        if c.size not in (1, 2, 3):
            raise ValueError("dimension must be 1, 2 or 3")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.dim) * self.radius**self.dim

    def _r(self, x):
        return np.linalg.norm(_points(x, self.dim) - self.center, axis=1)

    def contains(self, x):
        return self._r(x) < self.radius

    def distance(self, x):
        return np.maximum(self._r(x) - self.radius, 0.0)

    def depth(self, x):
        return np.maximum(self.radius - self._r(x), 0.0)

    def bounds(self):
        return self.center - self.radius, self.center + self.radius

    @property
    def scale_length(self) -> float:
        return self.radius

    def ray_interval(self, y, dirs):
        y = _points(y, self.dim)
        d = np.asarray(dirs, dtype=float).reshape(-1, self.dim)
        rel = y - self.center
        b = rel @ d.T
        c = np.sum(rel * rel, axis=1)[:, None] - self.radius**2
        disc = b * b - c
        root = np.sqrt(np.maximum(disc, 0.0))
        enter = -b - root
        exit_ = -b + root
        empty = disc <= 0
        enter = np.where(empty, np.inf, enter)
        exit_ = np.where(empty, -np.inf, exit_)
        return enter, exit_

    def scaled(self, lam):
        return Ball(self.center * lam, self.radius * lam)

    def translated(self, v):
        return Ball(self.center + np.asarray(v, dtype=float), self.radius)

    def key(self):
        return ("ball", tuple(np.round(self.center, 12)), round(self.radius, 12))

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius:.6g})"


@dataclass(frozen=True, eq=False)
class AxisBox(GeometricSet):
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float)).copy()
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float)).copy()
        if lo.shape != hi.shape or lo.size not in (1, 2, 3):
            raise ValueError("lo/hi must be vectors of equal dimension 1..3")
        if not np.all(lo < hi):
            raise ValueError(f"box requires lo < hi componentwise, got {lo} / {hi}")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def contains(self, x):
        x = _points(x, self.dim)
        return np.all((x > self.lo) & (x < self.hi), axis=1)

    def distance(self, x):
        x = _points(x, self.dim)
        gap = np.maximum(np.maximum(self.lo - x, x - self.hi), 0.0)
        return np.linalg.norm(gap, axis=1)

    def depth(self, x):
        x = _points(x, self.dim)
        inner = np.minimum(x - self.lo, self.hi - x).min(axis=1)
        return np.maximum(inner, 0.0)

    def bounds(self):
        return self.lo.copy(), self.hi.copy()

    def ray_interval(self, y, dirs):
        y = _points(y, self.dim)
        d = np.asarray(dirs, dtype=float).reshape(-1, self.dim)
        enter = np.full((y.shape[0], d.shape[0]), -np.inf)
        exit_ = np.full((y.shape[0], d.shape[0]), np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            for i in range(self.dim):
                di = d[:, i][None, :]
                yi = y[:, i][:, None]
                t1 = (self.lo[i] - yi) / di
                t2 = (self.hi[i] - yi) / di
                lo_t = np.minimum(t1, t2)
                hi_t = np.maximum(t1, t2)
                par = di == 0
                inside = (yi > self.lo[i]) & (yi < self.hi[i])
                lo_t = np.where(par, np.where(inside, -np.inf, np.inf), lo_t)
                hi_t = np.where(par, np.where(inside, np.inf, -np.inf), hi_t)
                enter = np.maximum(enter, lo_t)
                exit_ = np.minimum(exit_, hi_t)
        return enter, exit_

    def scaled(self, lam):
        return AxisBox(self.lo * lam, self.hi * lam)

    def translated(self, v):
        v = np.asarray(v, dtype=float)
        return AxisBox(self.lo + v, self.hi + v)

    def key(self):
        return ("box", tuple(np.round(self.lo, 12)), tuple(np.round(self.hi, 12)))

    def __repr__(self):
        return f"AxisBox(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


def _overlap(a: GeometricSet, b: GeometricSet) -> bool:
    """True when the open sets a and b intersect."""
    if isinstance(a, Ball) and isinstance(b, Ball):
        return float(np.linalg.norm(a.center - b.center)) < a.radius + b.radius
    if isinstance(a, AxisBox) and isinstance(b, AxisBox):
        return bool(np.all((a.lo < b.hi) & (b.lo < a.hi)))
    ball, box = (a, b) if isinstance(a, Ball) else (b, a)
    return float(box.distance(ball.center)[0]) < ball.radius


@dataclass(frozen=True, eq=False)
class DisjointUnion(GeometricSet):
    parts: tuple = field(default_factory=tuple)
    dim_hint: int | None = None

    def __post_init__(self):
        parts = tuple(self.parts)
        for p in parts:
            if not isinstance(p, (Ball, AxisBox)):
                raise TypeError("union members must be Ball or AxisBox")
        dims = {p.dim for p in parts}
        if len(dims) > 1:
            raise ValueError("union members have mixed dimensions")
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                if _overlap(parts[i], parts[j]):
                    raise ValueError(f"union members {i} and {j} overlap")
        object.__setattr__(self, "parts", parts)
        if parts:
            object.__setattr__(self, "dim_hint", parts[0].dim)
        elif self.dim_hint is None:
            object.__setattr__(self, "dim_hint", 1)

    @property
    def dim(self) -> int:
        return self.dim_hint

    @property
    def members(self):
        return self.parts

    @property
    def is_empty(self) -> bool:
        return not self.parts

    @property
    def volume(self) -> float:
        return float(sum(p.volume for p in self.parts))

    def contains(self, x):
        x = _points(x, self.dim)
        out = np.zeros(x.shape[0], dtype=bool)
        for p in self.parts:
            out |= p.contains(x)
        return out

    def distance(self, x):
        x = _points(x, self.dim)
        if not self.parts:
            return np.full(x.shape[0], np.inf)
        return np.min([p.distance(x) for p in self.parts], axis=0)

    def depth(self, x):
        x = _points(x, self.dim)
        if not self.parts:
            return np.zeros(x.shape[0])
        return np.max([p.depth(x) for p in self.parts], axis=0)

    def bounds(self):
        if not self.parts:
            z = np.zeros(self.dim)
            return z, z.copy()
        lo = np.min([p.bounds()[0] for p in self.parts], axis=0)
        hi = np.max([p.bounds()[1] for p in self.parts], axis=0)
        return lo, hi

    def scaled(self, lam):
        return DisjointUnion(tuple(p.scaled(lam) for p in self.parts), self.dim)

    def translated(self, v):
        return DisjointUnion(tuple(p.translated(v) for p in self.parts), self.dim)

    def key(self):
        return ("union",) + tuple(p.key() for p in self.parts)

    def __repr__(self):
        return f"DisjointUnion({list(self.parts)!r})"


EMPTY = DisjointUnion(())


def empty_set(dim: int) -> DisjointUnion:
    return DisjointUnion((), dim)


def normalized(E: GeometricSet) -> tuple[GeometricSet, np.ndarray, float]:
    """Translate the bounding-box centre to 0 and scale ``scale_length`` to 1.

    Returns ``(E0, shift, L)`` with ``E == E0.scaled(L).translated(shift)``.
    """
    lo, hi = E.bounds()
    shift = 0.5 * (lo + hi)
    L = E.scale_length
    return E.translated(-shift).scaled(1.0 / L), shift, L
