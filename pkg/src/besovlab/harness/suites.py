"""Suite orchestration: every suite expands into a list of independent checks.

Checks are built in (suite, corpus entry, params) order, evaluated in a
thread pool and reassembled in that order, so the report does not depend on
the thread count.
"""

from __future__ import annotations

import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, NamedTuple

import numpy as np

from ..besov import besov_seminorm, lp_norm
from ..capset.capacity import (
    CapacityFamilyConfig,
    GridScan,
    Linear,
    SmoothPoly,
    besov_capacity_upper,
)
from ..capset.choquet import choquet_lorentz_norm
from ..capset.netrusov import netrusov_upper
from ..capset.perimeter import (
    DivergentPerimeter,
    PerimeterMCConfig,
    fractional_perimeter,
    perimeter_exponents,
)
from ..core import (
    CORPUS_HALF_WIDTH,
    RADIAL_ENTRIES,
    BesovParams,
    GridFunction,
    LorentzParams,
    corpus_function,
    digitize,
    dilate,
    support_level,
)
from ..geometry import AxisBox, Ball, DisjointUnion, sphere_area
from ..lorentz import (
    CapacityEstimate,
    LebesgueVolume,
    LevelPartition,
    RadialWeight,
    lorentz_norm,
    weak_norm,
)
from ..rearrange import equimeasurable, hardy_constant, rearrange, riesz_pairing, weighted_integral
from .config import SuiteConfig, format_params
from .report import CheckReport

__all__ = [
    "run_suite",
    "check_seed",
    "geometric_corpus",
    "unit_set",
    "capacity_profile",
    "DILATIONS",
]

DILATIONS = (0.5, 1.0, 2.0)
SCALING_FACTOR = 2.0
HARDY_SLACK = 1e-4  # origin-cell ball rule over-weights the central cell slightly


class _Check(NamedTuple):
    check_id: str
    params: str
    run: Callable[[int], list[CheckReport]]


def check_seed(base: int, check_id: str, params: str) -> int:
    """Independent u64 seed per check, derived from the run seed."""
    key = zlib.crc32(f"{check_id}|{params}".encode())
    ss = np.random.SeedSequence(int(base), spawn_key=(key,))
    return int(ss.generate_state(1, np.uint64)[0])


def _rel(a: float, b: float) -> float:
    if b == 0:
        return 0.0 if a == 0 else math.inf
    return abs(a / b - 1.0)


def _spread(values) -> float:
    lo, hi = min(values), max(values)
    return hi / lo - 1.0 if lo > 0 else math.inf


class _Row:
    """Builder for one CheckReport; ``seed`` and timing are filled in later."""

    def __init__(self, check_id, params, lhs, rhs, tol, passed, stderr=None, flags=()):
        self.fields = dict(check_id=check_id, params=params, lhs=float(lhs), rhs=float(rhs),
                           ratio=float(lhs) / float(rhs) if rhs > 0 else None,
                           tolerance=float(tol), passed=bool(passed),
                           stderr_mc=None if stderr is None else float(stderr),
                           flags=tuple(flags))

    def build(self, seed, runtime_ms):
        return CheckReport(seed=seed, runtime_ms=runtime_ms, **self.fields)


def _equal(cid, params, lhs, rhs, tol, **kw):
    return _Row(cid, params, lhs, rhs, tol, _rel(lhs, rhs) <= tol, **kw)


def _at_most(cid, params, lhs, rhs, tol, **kw):
    return _Row(cid, params, lhs, rhs, tol, lhs <= rhs * (1 + tol), **kw)


def _report_only(cid, params, lhs, rhs, flag, extra=()):
    return _Row(cid, params, lhs, rhs, 0.0, True, flags=(flag, "report_only") + tuple(extra))


# ---------------------------------------------------------------------------
# inputs

def _sample(name: str, dim: int, resolution: int, lam: float = 1.0,
            margin: float = 0.0) -> GridFunction:
    """``x -> f(lam x)`` sampled at the corpus spacing on a grid wide enough for it."""
    h = 1.0 / resolution
    m = int(math.ceil((CORPUS_HALF_WIDTH / lam + margin) * resolution)) + 1
    ax = h * np.arange(-m, m + 1)
    x = np.stack(np.meshgrid(*[ax] * dim, indexing="ij"), axis=-1)
    return GridFunction(corpus_function(name, lam * x), h, np.full(dim, -m * h))


def geometric_corpus(dim: int) -> list[tuple[str, object]]:
    """Ball, box and a ball-plus-box union, all inside ``[-1, 1]^n``."""
    z = np.zeros(dim)
    shift = np.zeros(dim)
    shift[0] = 0.6
    return [
        ("ball", Ball(z, 0.5)),
        ("box", AxisBox(np.full(dim, -0.3), np.full(dim, 0.4))),
        ("union", DisjointUnion((Ball(-shift, 0.25), AxisBox(z + 0.05, z + 0.45)))),
    ]


def capacity_profile(name: str):
    return {"linear": Linear(), "smooth3": SmoothPoly(3), "smooth5": SmoothPoly(5)}[name]


def _family(cfg: SuiteConfig, relative: bool = True) -> CapacityFamilyConfig:
    return CapacityFamilyConfig(cfg.capacity_eps, capacity_profile(cfg.capacity_profile),
                                GridScan(), cfg.capacity_resolution, relative)


def _perimeter_cfg(cfg: SuiteConfig, seed: int) -> PerimeterMCConfig:
    return PerimeterMCConfig(outer_samples=cfg.perimeter_samples, seed=seed)


def _radial_names(cfg: SuiteConfig) -> list[str]:
    return [nm for nm in cfg.corpus.names if nm.partition(":")[0] in RADIAL_ENTRIES]


def _perimeter_defined(P: BesovParams) -> bool:
    try:
        perimeter_exponents(P)
    except DivergentPerimeter:
        return False
    return True


def _exponents(P: BesovParams) -> tuple[float, float]:
    """Sobolev exponent ``r = np/(n - p beta)`` and ``s = max(p, q)``."""
    return P.sobolev_exponent, P.pq_max


# ---------------------------------------------------------------------------
# suites

def _scaling(cfg: SuiteConfig) -> list[_Check]:
    tol = cfg.tolerances["scaling"]
    lam = SCALING_FACTOR
    n, res = cfg.corpus.dim, cfg.corpus.resolution
    checks = []
    for name in cfg.corpus.names:
        for P in cfg.params:
            r, s = _exponents(P)

            def besov_row(seed, name=name, P=P):
                a = besov_seminorm(_sample(name, n, res), P, cfg.quad)
                b = besov_seminorm(_sample(name, n, res, lam), P, cfg.quad)
                return [_equal(f"scaling/besov/{name}", format_params(P), b / a,
                               lam ** (P.beta - n / P.p), tol)]

            def lorentz_row(seed, name=name, P=P, r=r, s=s):
                lp = LorentzParams(r, s)
                a = lorentz_norm(_sample(name, n, res), lp, LebesgueVolume())
                b = lorentz_norm(_sample(name, n, res, lam), lp, LebesgueVolume())
                return [_equal(f"scaling/lorentz/{name}", format_params(P), b / a,
                               lam ** (-n / r), tol)]

            checks.append(_Check(f"scaling/besov/{name}", format_params(P), besov_row))
            checks.append(_Check(f"scaling/lorentz/{name}", format_params(P), lorentz_row))
    for gname, E in geometric_corpus(n):
        for P in cfg.params:
            if not _perimeter_defined(P):
                continue

            def perim_row(seed, E=E, P=P, gname=gname, e=n / P.p - P.p * P.beta / P.q):
                mc = _perimeter_cfg(cfg, seed)
                a = fractional_perimeter(E, P, mc)
                b = fractional_perimeter(E.scaled(lam), P, mc)
                ratio = b.value / a.value
                se = ratio * math.hypot(a.stderr / a.value, b.stderr / b.value)
                return [_equal(f"scaling/perimeter/{gname}", format_params(P), ratio,
                               lam**e, tol, stderr=se)]

            checks.append(_Check(f"scaling/perimeter/{gname}", format_params(P), perim_row))
    return checks


def _lemma21(cfg: SuiteConfig) -> list[_Check]:
    tol = cfg.tolerances["lemma21"]
    exact = cfg.tolerances["exact"]
    n, res = cfg.corpus.dim, cfg.corpus.resolution
    contents = (LebesgueVolume(), RadialWeight(0.5))
    checks = []
    for name in cfg.corpus.names:
        for nu in contents:
            for p0 in (1.0, 2.0):
                for r in (2.0, 4.0):
                    label = f"{p0:g}/{r:g}/{nu.label()}"

                    def weak_row(seed, name=name, nu=nu, p0=p0, r=r):
                        f = _sample(name, n, res)
                        w = weak_norm(f, p0, nu)
                        s = lorentz_norm(f, LorentzParams(p0, r), nu)
                        return [_at_most(f"lemma21/weak_vs_lorentz/{name}", label, w, s, tol)]

                    checks.append(_Check(f"lemma21/weak_vs_lorentz/{name}", label, weak_row))

        def ratio_row(seed, name=name):
            rows = []
            for p0, r in ((1.0, 2.0), (2.0, 4.0)):
                ratios = []
                for lam in (1.0, SCALING_FACTOR):
                    f = dilate(_sample(name, n, res), lam)
                    ratios.append(weak_norm(f, p0, LebesgueVolume())
                                  / lorentz_norm(f, LorentzParams(p0, r), LebesgueVolume()))
                rows.append(_equal(f"lemma21/ratio_stability/{name}", f"{p0:g}/{r:g}",
                                   ratios[1], ratios[0], exact))
            return rows

        def layer_cake_row(seed, name=name):
            f = _sample(name, n, res)
            rows = []
            for p0 in sorted({1.0, 2.0, *(P.p for P in cfg.params)}):
                a = lorentz_norm(f, LorentzParams(p0, p0), LebesgueVolume())
                rows.append(_equal(f"lemma21/layer_cake/{name}", f"{p0:g}/{p0:g}",
                                   a, lp_norm(f, p0), exact))
            return rows

        checks.append(_Check(f"lemma21/ratio_stability/{name}", "-", ratio_row))
        checks.append(_Check(f"lemma21/layer_cake/{name}", "-", layer_cake_row))
    return checks


def _chain_rows(suite, name, P, tol, values):
    """Two chain ratios per dilation; each must be finite and dilation-stable."""
    rows = []
    for k, label in ((0, "left_middle"), (1, "middle_right")):
        ratios = [v[k] / v[k + 1] for v in values]
        finite = all(math.isfinite(x) and x > 0 for x in ratios)
        spread = _spread(ratios) if finite else math.inf
        rows.append(_Row(f"{suite}/{label}/{name}", format_params(P), max(ratios), min(ratios),
                         tol, finite and spread <= tol))
    return rows


def _sobolev_chain(cfg: SuiteConfig) -> list[_Check]:
    tol = cfg.tolerances["sobolev_chain"]
    n, res = cfg.corpus.dim, cfg.corpus.resolution
    checks = []
    for name in cfg.corpus.names:
        for P in cfg.params:
            def run(seed, name=name, P=P):
                r, s = _exponents(P)
                values = []
                for lam in DILATIONS:
                    f = _sample(name, n, res, lam)
                    values.append((lp_norm(f, r),
                                   lorentz_norm(f, LorentzParams(r, s), LebesgueVolume()),
                                   besov_seminorm(f, P, cfg.quad)))
                return _chain_rows("sobolev_chain", name, P, tol, values)

            checks.append(_Check(f"sobolev_chain/{name}", format_params(P), run))
    return checks


def _capacity_content(cfg: SuiteConfig, P: BesovParams, cache: dict) -> CapacityEstimate:
    key = (P, "cap")
    if key not in cache:
        cache[key] = CapacityEstimate(P, _family(cfg), cfg.quad)
    return cache[key]


def _capacitary_chain(cfg: SuiteConfig, cache: dict) -> list[_Check]:
    tol = cfg.tolerances["capacitary_chain"]
    n, res = cfg.corpus.dim, cfg.corpus.resolution
    checks = []
    for name in _radial_names(cfg):
        for P in cfg.params:
            def run(seed, name=name, P=P):
                r, s = _exponents(P)
                lp = LorentzParams(P.p, max(s, r))
                cap = _capacity_content(cfg, P, cache)
                values = []
                for lam in DILATIONS:
                    f = _sample(name, n, res, lam)
                    values.append((lp_norm(f, r), choquet_lorentz_norm(f, lp, cap),
                                   besov_seminorm(f, P, cfg.quad)))
                return _chain_rows("capacitary_chain", name, P, tol, values)

            checks.append(_Check(f"capacitary_chain/{name}", format_params(P), run))
    return checks


def _hardy(cfg: SuiteConfig) -> list[_Check]:
    tol = cfg.tolerances["hardy"]
    n, res = cfg.corpus.dim, cfg.corpus.resolution
    checks = []
    for name in cfg.corpus.names:
        for P in cfg.params:
            def run(seed, name=name, P=P):
                r, s = _exponents(P)
                gamma = n * (1 - s / P.p) + P.beta * s
                ratios = []
                for lam in DILATIONS:
                    f = _sample(name, n, res, lam)
                    ratios.append(weighted_integral(f, s, gamma) ** (1 / s)
                                  / besov_seminorm(f, P, cfg.quad))
                finite = all(math.isfinite(x) and x > 0 for x in ratios)
                rows = [_Row(f"hardy/stability/{name}", format_params(P), max(ratios),
                             min(ratios), tol, finite and _spread(ratios) <= tol)]
                f = _sample(name, n, res)
                if gamma >= 0:
                    # |x|^-gamma is symmetric decreasing, so rearranging can only help
                    rows.append(_at_most(f"hardy/rearranged/{name}", format_params(P),
                                         weighted_integral(f, s, gamma),
                                         weighted_integral(rearrange(f), s, gamma), HARDY_SLACK))
                lhs = weighted_integral(rearrange(f), P.p, P.p * P.beta)
                rhs = hardy_constant(n, P.p, P.beta) * lorentz_norm(
                    f, LorentzParams(r, P.p), LebesgueVolume()) ** P.p
                rows.append(_equal(f"hardy/identity/{name}", format_params(P), lhs, rhs, tol))
                return rows

            checks.append(_Check(f"hardy/{name}", format_params(P), run))

    def oracle(seed):
        ind = digitize(Ball(np.zeros(n), 1.0), 1.0 / res)
        exact = sphere_area(n) / (n - 0.5)
        return [_equal("hardy/oracle/indicator", "s=1;gamma=0.5",
                       weighted_integral(ind, 1.0, 0.5), exact, tol)]

    checks.append(_Check("hardy/oracle/indicator", "s=1;gamma=0.5", oracle))
    return checks


def _shifted(f: GridFunction, cells: int) -> GridFunction:
    return f.with_values(np.roll(f.values, cells, axis=0))


def _rearrange(cfg: SuiteConfig) -> list[_Check]:
    tol = cfg.tolerances["rearrange"]
    n, res = cfg.corpus.dim, cfg.corpus.resolution
    checks = []
    for name in cfg.corpus.names:
        def equi(seed, name=name):
            f = _sample(name, n, res)
            ok, dev = equimeasurable(f, rearrange(f))
            return [_Row(f"rearrange/equimeasurable/{name}", "-", dev, f.cell_volume, 0.0, ok)]

        def compose(seed, name=name):
            f = _sample(name, n, res)
            a = rearrange(f.with_values(np.abs(f.values) ** 2))
            b = rearrange(f).power(2.0)
            cuts = np.union1d(a.radii, b.radii)
            mid = 0.5 * (cuts[:-1] + cuts[1:]) if cuts.size > 1 else cuts
            dev = float(np.max(np.abs(a(mid) - b(mid))))
            scale = float(np.max(np.abs(b.values)))
            return [_Row(f"rearrange/composition/{name}", "s=2", dev, scale, tol,
                         dev <= tol * scale)]

        checks.append(_Check(f"rearrange/equimeasurable/{name}", "-", equi))
        checks.append(_Check(f"rearrange/composition/{name}", "s=2", compose))

    names = list(cfg.corpus.names)
    shift = int(round(0.5 * res))
    pairs = [(a, b, 0) for i, a in enumerate(names) for b in names[i + 1:]]
    pairs += [(a, a, shift) for a in names]
    for a, b, cells in pairs:
        tag = f"{a}+{b}" if not cells else f"{a}+{b}@{cells / res:g}"

        def riesz(seed, a=a, b=b, cells=cells, tag=tag):
            f = _sample(a, n, res, margin=cells / res)
            g = _shifted(_sample(b, n, res, margin=cells / res), cells)
            direct, sym = riesz_pairing(f, g)
            radial = cells == 0 and all(x.partition(":")[0] in RADIAL_ENTRIES for x in (a, b))
            if radial:
                return [_equal(f"rearrange/riesz_equal/{tag}", "-", direct, sym, tol)]
            return [_at_most(f"rearrange/riesz/{tag}", "-", direct, sym, tol)]

        checks.append(_Check(f"rearrange/riesz/{tag}", "-", riesz))
    return checks


def _coarea(cfg: SuiteConfig) -> list[_Check]:
    tol = cfg.tolerances["coarea"]
    n, res = cfg.corpus.dim, cfg.corpus.resolution
    checks = []
    params = [P for P in cfg.params if P.p == 1 and P.q == 1]
    for name in _radial_names(cfg):
        for P in params:
            def run(seed, name=name, P=P):
                f = _sample(name, n, res)
                t = LevelPartition.grid_values(f).levels
                prev = np.concatenate([[0.0], t[:-1]])
                mc = _perimeter_cfg(cfg, seed)
                terms, var = [], 0.0
                for lo, hi in zip(prev, t):
                    E = support_level(f, lo).geometry
                    est = fractional_perimeter(E, P, mc)
                    terms.append(2 * est.value * (hi - lo))
                    var += (2 * est.stderr * (hi - lo)) ** 2
                return [_equal(f"coarea/{name}", format_params(P), besov_seminorm(f, P, cfg.quad),
                               math.fsum(terms), tol, stderr=math.sqrt(var))]

            checks.append(_Check(f"coarea/{name}", format_params(P), run))
    return checks


def unit_set(n: int):
    return AxisBox(np.zeros(n), np.ones(n)) if n == 1 else Ball(np.zeros(n), 0.5)


def _perimeter_capacity(cfg: SuiteConfig) -> list[_Check]:
    tol = cfg.tolerances["perimeter_capacity"]
    n = cfg.corpus.dim
    K = unit_set(n)
    checks = []
    for P in cfg.params:
        if P.p != P.q or P.p < 1 or not _perimeter_defined(P):
            continue

        def run(seed, P=P):
            per = fractional_perimeter(K, P, _perimeter_cfg(cfg, seed))
            target = 2 ** (1 / P.p) * per.value
            se = 2 ** (1 / P.p) * per.stderr
            label = format_params(P)
            prof = capacity_profile(cfg.capacity_profile)
            trend = []
            rows = []
            for eps in cfg.capacity_eps:
                fam = CapacityFamilyConfig((eps,), prof, GridScan(), cfg.capacity_resolution)
                if eps < 2 / cfg.capacity_resolution:
                    continue
                norm = besov_capacity_upper(K, P, fam, cfg.quad).value ** (1 / P.p)
                trend.append((eps, norm))
                rows.append(_report_only(f"perimeter_capacity/trend/eps={eps:g}", label,
                                         norm, target, "trend"))
            eps_min = 2.0 / cfg.limit_resolution
            fam = CapacityFamilyConfig((eps_min,), prof, GridScan(), cfg.limit_resolution)
            limit = besov_capacity_upper(K, P, fam, cfg.quad).value ** (1 / P.p)
            trend.append((eps_min, limit))
            gaps = [abs(v / target - 1) for _, v in trend]
            monotone = all(b <= a for a, b in zip(gaps, gaps[1:]))
            rows.append(_report_only("perimeter_capacity/trend/monotone", label,
                                     gaps[-1], gaps[0], "trend",
                                     ("monotone" if monotone else "non_monotone",)))
            rows.append(_equal(f"perimeter_capacity/limit/eps={eps_min:g}", label, limit, target,
                               tol, stderr=se))
            best = min(v for _, v in trend)
            rows.append(_at_most("perimeter_capacity/bound", label, best, 2 * per.value, tol,
                                 stderr=2 * per.stderr, flags=("upper_bound",)))
            return rows

        checks.append(_Check("perimeter_capacity", format_params(P), run))
    return checks


def _isocap_report(cfg: SuiteConfig, cache: dict) -> list[_Check]:
    n, res = cfg.corpus.dim, cfg.corpus.resolution
    checks = []
    for gname, E in geometric_corpus(n):
        for P in cfg.params:
            def run(seed, E=E, P=P, gname=gname):
                d = n - P.p * P.beta
                cap = besov_capacity_upper(E, P, _family(cfg), cfg.quad).value
                label = format_params(P)
                return [
                    _report_only(f"isocap_report/volume/{gname}", label,
                                 E.volume ** (d / n), cap, "one_sided_bound"),
                    _report_only(f"isocap_report/netrusov/{gname}", label,
                                 cap, netrusov_upper(E, d, P.q / P.p), "one_sided_bound"),
                ]

            checks.append(_Check(f"isocap_report/{gname}", format_params(P), run))
    for name in _radial_names(cfg):
        for P in cfg.params:
            def lorentz_vs_cap(seed, name=name, P=P):
                r, s = _exponents(P)
                q0 = max(s, r)
                f = _sample(name, n, res)
                lhs = lorentz_norm(f, LorentzParams(r, q0), LebesgueVolume())
                rhs = choquet_lorentz_norm(f, LorentzParams(P.p, q0),
                                           _capacity_content(cfg, P, cache))
                return [_report_only(f"isocap_report/lorentz_vs_capacitary/{name}",
                                     format_params(P), lhs, rhs, "one_sided_bound")]

            checks.append(_Check(f"isocap_report/lorentz_vs_capacitary/{name}",
                                 format_params(P), lorentz_vs_cap))
    return checks


def _expand(cfg: SuiteConfig, suite: str, cache: dict) -> list[_Check]:
    if suite == "scaling":
        return _scaling(cfg)
    if suite == "lemma21":
        return _lemma21(cfg)
    if suite == "sobolev_chain":
        return _sobolev_chain(cfg)
    if suite == "capacitary_chain":
        return _capacitary_chain(cfg, cache)
    if suite == "hardy":
        return _hardy(cfg)
    if suite == "rearrange":
        return _rearrange(cfg)
    if suite == "coarea":
        return _coarea(cfg)
    if suite == "perimeter_capacity":
        return _perimeter_capacity(cfg)
    if suite == "isocap_report":
        return _isocap_report(cfg, cache)
    raise ValueError(f"unknown suite {suite!r}")


def run_suite(cfg: SuiteConfig) -> list[CheckReport]:
    """Run the configured suites and return their reports in catalog order."""
    cache: dict = {}
    checks = [c for s in cfg.suites for c in _expand(cfg, s, cache)]

    def evaluate(c: _Check) -> list[CheckReport]:
        seed = check_seed(cfg.seed, c.check_id, c.params)
        t0 = time.perf_counter()
        rows = c.run(seed)
        ms = int(round((time.perf_counter() - t0) * 1000)) if cfg.timing else 0
        return [r.build(seed, ms) for r in rows]

    if cfg.threads > 1 and len(checks) > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            parts = list(pool.map(evaluate, checks))
    else:
        parts = [evaluate(c) for c in checks]
    return [r for part in parts for r in part]
