"""Lorentz norms with a capacity in place of a measure."""

from __future__ import annotations

import numpy as np

from ..core import GridFunction, LorentzParams, support_level
from ..geometry import AxisBox, Ball
from ..lorentz import CapacityEstimate, LevelPartition, NetrusovContent, NotEvaluable

__all__ = ["choquet_lorentz_norm", "capacity_distribution"]


def capacity_distribution(f: GridFunction, cap, thresholds) -> np.ndarray:
    """``cap(O_t(f))`` for each threshold.

    Every nonempty superlevel set must be a single ball; a small digitized
    ball that fills its bounding block is recognized as a box and accepted too.
    """
    if not isinstance(cap, (CapacityEstimate, NetrusovContent)):
        raise TypeError("cap must be a CapacityEstimate or NetrusovContent")
    out = []
    for t in thresholds:
        level = support_level(f, float(t))
        if level.is_empty:
            out.append(0.0)
            continue
        if not isinstance(level.geometry, (Ball, AxisBox)):
            raise NotEvaluable(
                f"superlevel set at t={t:.6g} is not a single ball or box; "
                "capacitary norms need a radial nonincreasing function")
        out.append(cap.evaluate(level))
    return np.array(out)


def choquet_lorentz_norm(f: GridFunction, lp: LorentzParams, cap) -> float:
    """``(int_0^inf cap(O_t)^{q0/p0} dt^{q0})^{1/q0}`` on the grid-value partition.

    Capacities are cached per ball by the content object, so each distinct
    radius is evaluated once.
    """
    if lp.weak:
        raise ValueError("q0 = INFINITY is not supported for capacitary norms")
    if f.is_zero():
        return 0.0
    t = LevelPartition.grid_values(f).levels
    prev = np.concatenate([[0.0], t[:-1]])
    caps = capacity_distribution(f, cap, prev)
    total = float(np.sum(caps ** (lp.q0 / lp.p0) * (t**lp.q0 - prev**lp.q0)))
    return total ** (1.0 / lp.q0)
