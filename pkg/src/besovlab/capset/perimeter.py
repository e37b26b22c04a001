"""Fractional (beta, p, q)-perimeter

    P(E) = ( int_E ( int_{E^c} |x - y|^{-s} dx )^{q/p} dy )^{1/q},
    s = (n + p beta) p / q,

by importance-sampled Monte Carlo over ``y in E``. The inner integral is
either exact along rays (``F(a) = a^{-(s-n)}/(s-n)`` integrated over the
complement on every ray, then an angular rule) or sampled with radii
``rho = d U^{-1/(s-n)}`` that start at the distance to the boundary.

For ``y`` at depth ``d`` the inner integral grows like ``d^{n-s}``, so the
outer integrand behaves like ``d^{-a}`` with ``a = n + p beta - n q/p``.
Outer points are drawn from a mixture of the uniform law and a law with
density proportional to ``d^{-a}`` near the boundary.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..core import BesovParams
from ..geometry import AxisBox, Ball, GeometricSet, sphere_area

__all__ = [
    "RadialExact",
    "MCImportance",
    "PerimeterMCConfig",
    "PerimeterEstimate",
    "fractional_perimeter",
    "perimeter_exponents",
    "DivergentPerimeter",
]


class DivergentPerimeter(ValueError):
    """The defining integral diverges for these parameters."""


@dataclass(frozen=True)
class RadialExact:
    """Ray-exact inner integral; ``angular_points`` defaults to 2 / 128 / 24x48."""

    angular_points: int | None = None


@dataclass(frozen=True)
class MCImportance:
    samples: int = 256

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("MCImportance needs at least one sample")


@dataclass(frozen=True)
class PerimeterMCConfig:
    """Monte Carlo settings.

    ``inner_scheme=None`` picks :class:`RadialExact` for a single ball or box
    and :class:`MCImportance` for unions. ``boundary_exponent=None`` uses the
    exponent ``a`` of the outer integrand; ``boundary_weight`` is the mixture
    weight of the uniform component.
    """

    outer_samples: int = 10_000
    inner_scheme: RadialExact | MCImportance | None = None
    seed: int = 0
    boundary_exponent: float | None = None
    boundary_weight: float = 0.5
    batch_size: int = 2048
    threads: int = 1

    def __post_init__(self):
        if self.outer_samples < 1000:
            raise ValueError(f"outer_samples must be >= 1000, got {self.outer_samples}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not 0 < self.boundary_weight <= 1:
            raise ValueError("boundary_weight must lie in (0, 1]")
        if self.boundary_exponent is not None and not 0 <= self.boundary_exponent < 1:
            raise ValueError("boundary_exponent must lie in [0, 1)")
        if self.batch_size < 1 or self.threads < 1:
            raise ValueError("batch_size and threads must be >= 1")


@dataclass(frozen=True)
class PerimeterEstimate:
    value: float
    stderr: float
    samples: int

    def __float__(self):
        return self.value


def perimeter_exponents(params: BesovParams) -> tuple[float, float]:
    """``(s, boundary exponent)`` after checking both convergence conditions."""
    n, p, q, beta = params.dim, params.p, params.q, params.beta
    s = (n + p * beta) * p / q
    margin = n * q / p - (n + p * beta)
    if not margin > -1:
        raise DivergentPerimeter(
            f"outer integral diverges: n q/p - (n + p beta) = {margin:.6g} <= -1")
    if not s > n:
        raise DivergentPerimeter(
            f"inner integral diverges at infinity: kernel exponent s = {s:.6g} <= n = {n}")
    return s, max(0.0, -margin)


# ---------------------------------------------------------------------------
# angular rules

def _angular_rule(n: int, m: int | None) -> tuple[np.ndarray, np.ndarray]:
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 2:
        m = 128 if m is None else m
        ang = 2 * math.pi * (np.arange(m) + 0.5) / m
        return np.stack([np.cos(ang), np.sin(ang)], axis=1), np.full(m, 2 * math.pi / m)
    m_theta = 24 if m is None else m
    m_phi = 2 * m_theta
    x, w = np.polynomial.legendre.leggauss(m_theta)
    phi = 2 * math.pi * (np.arange(m_phi) + 0.5) / m_phi
    ct, ph = np.meshgrid(x, phi, indexing="ij")
    st = np.sqrt(1 - ct**2)
    dirs = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1).reshape(-1, 3)
    weights = (w[:, None] * np.full(m_phi, 2 * math.pi / m_phi)[None, :]).ravel()
    return dirs, weights


def _ray_inner(E: GeometricSet, y: np.ndarray, alpha: float, rule) -> np.ndarray:
    """Exact ``int_{E^c} |x-y|^{-s} dx`` along each ray, then the angular sum."""
    dirs, weights = rule
    members = E.members
    F = lambda a: a ** (-alpha) / alpha
    total = np.zeros((y.shape[0], dirs.shape[0]))
    inside = [m.contains(y) for m in members]
    for j, mem in enumerate(members):
        rows = inside[j]
        if not np.any(rows):
            continue
        yj = y[rows]
        _, exit_j = mem.ray_interval(yj, dirs)
        acc = F(exit_j)
        for i, other in enumerate(members):
            if i == j:
                continue
            enter, exit_ = other.ray_interval(yj, dirs)
            hit = (exit_ > enter) & (exit_ > 0)
            with np.errstate(divide="ignore", invalid="ignore"):
                blocked = np.where(hit, F(np.maximum(enter, 1e-300)) - F(exit_), 0.0)
            acc = acc - blocked
        total[rows] = acc
    return total @ weights


def _mc_inner(E: GeometricSet, y: np.ndarray, alpha: float, samples: int,
              rng: np.random.Generator) -> np.ndarray:
    n = y.shape[1]
    d = E.depth(y)
    out = np.empty(y.shape[0])
    for lo in range(0, y.shape[0], 256):
        yy, dd = y[lo:lo + 256], d[lo:lo + 256]
        theta = rng.standard_normal((yy.shape[0], samples, n))
        theta /= np.linalg.norm(theta, axis=-1, keepdims=True)
        u = 1.0 - rng.random((yy.shape[0], samples))
        rho = dd[:, None] * u ** (-1.0 / alpha)
        pts = yy[:, None, :] + rho[..., None] * theta
        outside = ~E.contains(pts.reshape(-1, n)).reshape(yy.shape[0], samples)
        out[lo:lo + 256] = sphere_area(n) * dd ** (-alpha) / alpha * outside.mean(axis=1)
    return out


# ---------------------------------------------------------------------------
# outer sampling

# boundary-concentrated draws are kept this far (relative) from the boundary;
# the excluded layer carries mass ~ MIN_DEPTH^(1-a)
MIN_DEPTH = 1e-12


def _radius_mixture(rng, count, R, n, a, w):
    """Radius in a ball: uniform-in-volume with prob ``w``, else depth ~ d^{-a}."""
    uniform = rng.random(count) < w
    u = rng.random(count)
    r_vol = R * u ** (1.0 / n)
    depth = np.maximum(R * u ** (1.0 / (1.0 - a)), MIN_DEPTH * R)
    r = np.where(uniform, r_vol, R - depth)
    return r


def _radius_density(r, R, n, a, w):
    d = np.maximum(R - r, MIN_DEPTH * R)
    p_vol = n * r ** (n - 1) / R**n
    p_bd = (1 - a) * d ** (-a) / R ** (1 - a)
    return w * p_vol + (1 - w) * p_bd


def _sample_ball(ball: Ball, rng, count, a, w):
    n, R = ball.dim, ball.radius
    r = _radius_mixture(rng, count, R, n, a, w)
    theta = rng.standard_normal((count, n))
    theta /= np.linalg.norm(theta, axis=1, keepdims=True)
    y = ball.center + r[:, None] * theta
    dens = _radius_density(r, R, n, a, w) / (sphere_area(n) * np.maximum(r, 1e-300) ** (n - 1))
    return y, dens


def _sample_box(box: AxisBox, rng, count, a, w):
    n = box.dim
    y = np.empty((count, n))
    dens = np.ones(count)
    for i in range(n):
        lo, hi = box.lo[i], box.hi[i]
        L = hi - lo
        half = L / 2
        uniform = rng.random(count) < w
        u = rng.random(count)
        side = rng.random(count) < 0.5
        gap = np.maximum(half * u ** (1.0 / (1.0 - a)), MIN_DEPTH * half)
        x = np.where(uniform, lo + L * u, np.where(side, lo + gap, hi - gap))
        y[:, i] = x
        g = np.maximum(np.minimum(x - lo, hi - x), MIN_DEPTH * half)
        dens *= w / L + (1 - w) * 0.5 * (1 - a) * g ** (-a) / half ** (1 - a)
    return y, dens


def _sample_set(E: GeometricSet, rng, count, a, w):
    members = E.members
    vols = np.array([m.volume for m in members])
    probs = vols / vols.sum()
    which = rng.choice(len(members), size=count, p=probs) if len(members) > 1 \
        else np.zeros(count, dtype=int)
    y = np.empty((count, E.dim))
    dens = np.empty(count)
    for j, mem in enumerate(members):
        rows = which == j
        k = int(rows.sum())
        if not k:
            continue
        sampler = _sample_ball if isinstance(mem, Ball) else _sample_box
        yj, dj = sampler(mem, rng, k, a, w)
        y[rows] = yj
        dens[rows] = probs[j] * dj
    return y, dens


def _default_scheme(E: GeometricSet):
    return RadialExact() if len(E.members) == 1 else MCImportance()


def fractional_perimeter(E: GeometricSet, params: BesovParams,
                         cfg: PerimeterMCConfig | None = None) -> PerimeterEstimate:
    """Monte Carlo estimate of the (beta, p, q)-perimeter with its standard error.

    Raises :class:`DivergentPerimeter` when the defining integral is infinite.
    """
    cfg = PerimeterMCConfig() if cfg is None else cfg
    if params.dim != E.dim:
        params = params.with_dim(E.dim)
    s, a_nat = perimeter_exponents(params)
    if E.is_empty:
        return PerimeterEstimate(0.0, 0.0, 0)
    n, alpha = E.dim, s - E.dim
    a = a_nat if cfg.boundary_exponent is None else cfg.boundary_exponent
    w = cfg.boundary_weight if a > 0 else 1.0
    power = params.q / params.p
    scheme = cfg.inner_scheme or _default_scheme(E)
    rule = _angular_rule(n, scheme.angular_points) if isinstance(scheme, RadialExact) else None

    sizes = [cfg.batch_size] * (cfg.outer_samples // cfg.batch_size)
    if cfg.outer_samples % cfg.batch_size:
        sizes.append(cfg.outer_samples % cfg.batch_size)
    streams = np.random.SeedSequence(int(cfg.seed)).spawn(len(sizes))

    def batch(i):
        rng = np.random.default_rng(streams[i])
        y, dens = _sample_set(E, rng, sizes[i], a, w)
        if rule is not None:
            inner = _ray_inner(E, y, alpha, rule)
        else:
            inner = _mc_inner(E, y, alpha, scheme.samples, rng)
        vals = np.maximum(inner, 0.0) ** power / dens
        return float(np.sum(vals)), float(np.sum(vals * vals))

    if cfg.threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            parts = list(pool.map(batch, range(len(sizes))))
    else:
        parts = [batch(i) for i in range(len(sizes))]
    N = cfg.outer_samples
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / N
    var = max(s2 / N - mean * mean, 0.0) / (N - 1)
    q = params.q
    value = mean ** (1.0 / q)
    stderr = value / (q * mean) * math.sqrt(var) if mean > 0 else 0.0
    return PerimeterEstimate(value, stderr, N)
