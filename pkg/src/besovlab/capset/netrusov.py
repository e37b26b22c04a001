"""Covering upper bounds for the Netrusov content

    H(E) = inf ( sum_i (m_i 2^{-i d})^theta )^{1/theta},

where ``m_i`` counts covering balls with radius in ``(2^{-i-1}, 2^{-i}]`` and
every radius is at most ``eps``. The infimum is replaced by a minimum over
a finite, reproducible family of coverings:

* one circumscribing ball per component, and one for the whole set;
* lattice coverings by cubes of side ``2 rho / sqrt(n)`` (each inside a
  ball of radius ``rho``) for dyadic ``rho``, per component and global;
* per-component mixtures of the above.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np

from ..geometry import AxisBox, Ball, GeometricSet

__all__ = ["netrusov_upper", "dyadic_bin", "covering_value", "MAX_CUBES"]

MAX_CUBES = 4096
MAX_MIXTURES = 4096


def dyadic_bin(r: float) -> int:
    """``i`` with ``2^{-i-1} < r <= 2^{-i}``; negative for radii above 1."""
    return math.floor(-math.log2(r) + 1e-12)


def covering_value(bins: Counter, d: float, theta: float) -> float:
    total = math.fsum((m * 2.0 ** (-i * d)) ** theta for i, m in sorted(bins.items()))
    return total ** (1.0 / theta)


def _circumradius(E: GeometricSet, center: np.ndarray) -> float:
    r = 0.0
    for m in E.members:
        if isinstance(m, Ball):
            r = max(r, float(np.linalg.norm(m.center - center)) + m.radius)
        else:
            far = np.maximum(np.abs(m.lo - center), np.abs(m.hi - center))
            r = max(r, float(np.linalg.norm(far)))
    return r


def _component_ball(m) -> float:
    if isinstance(m, Ball):
        return m.radius
    return 0.5 * float(np.linalg.norm(m.hi - m.lo))


def _cube_hits(member, centres: np.ndarray, side: float) -> np.ndarray:
    """Cubes (given by centres) meeting the open member set."""
    half = side / 2
    if isinstance(member, AxisBox):
        return np.all((centres - half < member.hi) & (centres + half > member.lo), axis=1)
    gap = np.maximum(np.abs(centres - member.center) - half, 0.0)
    return np.linalg.norm(gap, axis=1) < member.radius


def _lattice_count(members, rho: float, limit: int) -> int | None:
    """Number of lattice cubes meeting any member, or None above ``limit``."""
    n = members[0].dim
    side = 2 * rho / math.sqrt(n)
    lo = np.min([m.bounds()[0] for m in members], axis=0)
    hi = np.max([m.bounds()[1] for m in members], axis=0)
    counts = np.maximum(np.ceil((hi - lo) / side).astype(int), 1)
    if float(np.prod(counts.astype(float))) > 16 * limit:
        return None
    axes = [lo[i] + side * (np.arange(counts[i]) + 0.5) for i in range(n)]
    centres = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    hit = np.zeros(centres.shape[0], dtype=bool)
    for m in members:
        hit |= _cube_hits(m, centres, side)
    total = int(hit.sum())
    return None if total > limit else total


def _options(members, eps: float, i_start: int, max_cubes: int) -> list[Counter]:
    """Candidate coverings of ``members`` with all radii <= eps."""
    opts = []
    i = i_start
    while True:
        rho = 2.0**-i
        if rho <= eps * (1 + 1e-12):
            count = _lattice_count(members, rho, max_cubes)
            if count is None:
                break
            opts.append(Counter({i: count}))
        i += 1
    return opts


def netrusov_upper(E: GeometricSet, d: float, theta: float, eps: float = math.inf,
                   max_cubes: int = MAX_CUBES) -> float:
    """Minimum Netrusov covering value over the candidate family.

    This is an upper bound on the content. Raises ``ValueError`` when ``eps``
    is below the smallest radius the lattice generator can reach with
    ``max_cubes`` cubes.
    """
    if not (d > 0 and theta > 0 and eps > 0):
        raise ValueError("need d, theta, eps > 0")
    if E.is_empty:
        return 0.0
    members = list(E.members)
    lo, hi = E.bounds()
    centre = 0.5 * (lo + hi)
    R_all = _circumradius(E, centre)
    candidates: list[Counter] = []
    if R_all <= eps:
        candidates.append(Counter({dyadic_bin(R_all): 1}))

    per_component = []
    for m in members:
        R = _component_ball(m)
        opts = [Counter({dyadic_bin(R): 1})] if R <= eps else []
        opts += _options([m], eps, dyadic_bin(R), max_cubes)
        per_component.append(opts)
    candidates += _options(members, eps, dyadic_bin(R_all), max_cubes)

    if all(per_component):
        sizes = [len(o) for o in per_component]
        if math.prod(sizes) <= MAX_MIXTURES:
            for combo in itertools.product(*per_component):
                candidates.append(sum(combo, Counter()))
        else:
            candidates.append(_greedy_mixture(per_component, d, theta))

    if not candidates:
        smallest = min(_component_ball(m) for m in members)
        i = dyadic_bin(smallest)
        while _lattice_count(members, 2.0**-i, max_cubes) is not None:
            i += 1
        raise ValueError(
            f"eps = {eps:.6g} is below the smallest covering radius reachable with "
            f"{max_cubes} cubes (about 2^-{i - 1} = {2.0 ** -(i - 1):.6g})")
    return min(covering_value(c, d, theta) for c in candidates)


def _greedy_mixture(per_component, d, theta) -> Counter:
    """Coordinate descent from each component's individually best option."""
    choice = [min(opts, key=lambda c: covering_value(c, d, theta)) for opts in per_component]
    best = covering_value(sum(choice, Counter()), d, theta)
    improved = True
    while improved:
        improved = False
        for j, opts in enumerate(per_component):
            for o in opts:
                trial = choice[:j] + [o] + choice[j + 1:]
                v = covering_value(sum(trial, Counter()), d, theta)
                if v < best - 1e-15:
                    best, choice, improved = v, trial, True
    return sum(choice, Counter())
