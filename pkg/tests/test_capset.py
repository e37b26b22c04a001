import math
import time

import numpy as np
import pytest

from besovlab.capset import (
    CapacityFamilyConfig,
    GoldenSection,
    MCImportance,
    PerimeterMCConfig,
    RadialExact,
    SmoothPoly,
    UnresolvedScale,
    besov_capacity_upper,
    capacity_family,
    choquet_lorentz_norm,
    fractional_perimeter,
    netrusov_upper,
)
from besovlab.capset.perimeter import DivergentPerimeter
from besovlab.core import BesovParams, CorpusSpec, LorentzParams, digitize, make_corpus, support_level
from besovlab.geometry import AxisBox, Ball, DisjointUnion, empty_set
from besovlab.lorentz import CapacityEstimate, LebesgueVolume, NetrusovContent, NotEvaluable, lorentz_norm

UNIT = AxisBox([0.0], [1.0])


def interval_perimeter(length, beta):
    return 2 * length ** (1 - beta) / (beta * (1 - beta))


def gap_term(a, b, c, d, beta):
    """int_a^b int_c^d |x-y|^{-1-beta} for a < b <= c < d."""
    e = 1 - beta
    return ((c - a) ** e - (c - b) ** e - (d - a) ** e + (d - b) ** e) / (beta * e)


# ---------------------------------------------------------------------------
# perimeter

def test_unit_interval_perimeter():
    t0 = time.perf_counter()
    est = fractional_perimeter(UNIT, BesovParams(0.5, 1, 1, 1, strict=False),
                               PerimeterMCConfig(10_000, seed=42))
    assert time.perf_counter() - t0 < 10
    assert est.value == pytest.approx(8.0, rel=0.02)
    assert 0 < est.stderr < 0.05


def test_equal_exponent_reduction():
    est = fractional_perimeter(UNIT, BesovParams(0.2, 2, 2, 1), PerimeterMCConfig(seed=42))
    assert est.value == pytest.approx(math.sqrt(interval_perimeter(1, 0.4)), rel=0.03)


@pytest.mark.parametrize("beta,p,q", [(0.3, 1, 1), (0.2, 2, 2), (0.3, 2, 1.5), (0.5, 0.8, 0.8)])
def test_perimeter_scaling(beta, p, q):
    P = BesovParams(beta, p, q, 1, strict=False)
    cfg = PerimeterMCConfig(seed=7)
    a = fractional_perimeter(UNIT, P, cfg).value
    b = fractional_perimeter(UNIT.scaled(2.0), P, cfg).value
    assert b / a == pytest.approx(2 ** (1 / p - p * beta / q), rel=0.03)


def test_union_matches_closed_form():
    beta = 0.3
    E = DisjointUnion((AxisBox([0.0], [0.5]), AxisBox([0.8], [1.0])))
    exact = (interval_perimeter(0.5, beta) + interval_perimeter(0.2, beta)
             - 2 * gap_term(0.0, 0.5, 0.8, 1.0, beta))
    est = fractional_perimeter(E, BesovParams(beta, 1, 1, 1),
                               PerimeterMCConfig(20_000, inner_scheme=MCImportance(128), seed=3))
    assert abs(est.value - exact) < 4 * est.stderr + 0.005 * exact


def test_inner_schemes_agree_on_a_disc():
    P = BesovParams(0.3, 1, 1, 2)
    B = Ball(np.zeros(2), 0.5)
    a = fractional_perimeter(B, P, PerimeterMCConfig(4000, RadialExact(), seed=1))
    b = fractional_perimeter(B, P, PerimeterMCConfig(4000, MCImportance(256), seed=1))
    assert abs(a.value - b.value) < 4 * math.hypot(a.stderr, b.stderr)


def test_seed_reproducible_and_thread_independent():
    P = BesovParams(0.3, 1, 1, 1)
    a = fractional_perimeter(UNIT, P, PerimeterMCConfig(5000, seed=11, batch_size=512))
    b = fractional_perimeter(UNIT, P, PerimeterMCConfig(5000, seed=11, batch_size=512, threads=4))
    assert a == b


@pytest.mark.parametrize("beta,p,q,msg", [
    (0.5, 2, 2, "outer integral"),
    (0.3, 1, 2, "inner integral"),
])
def test_divergent_perimeter_refused(beta, p, q, msg):
    with pytest.raises(DivergentPerimeter, match=msg):
        fractional_perimeter(UNIT, BesovParams(beta, p, q, 1, strict=False))


def test_perimeter_config_validation():
    with pytest.raises(ValueError):
        PerimeterMCConfig(outer_samples=10)
    with pytest.raises(ValueError):
        PerimeterMCConfig(seed=-1)


# ---------------------------------------------------------------------------
# capacity

P11 = BesovParams(0.3, 1, 1, 1)


def test_empty_set_has_zero_capacity():
    assert besov_capacity_upper(empty_set(1), P11) == (0.0, None)


def test_capacity_monotone_on_nested_balls():
    small = besov_capacity_upper(Ball([0.0], 0.5), P11).value
    big = besov_capacity_upper(Ball([0.0], 1.0), P11).value
    assert 0 < small <= big


def test_capacity_limit_towards_twice_perimeter():
    per = interval_perimeter(1.0, 0.3)
    gaps = []
    for res in (128, 256, 512):
        fam = CapacityFamilyConfig((2 / res,), resolution=res)
        gaps.append(abs(besov_capacity_upper(UNIT, P11, fam).value / (2 * per) - 1))
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < 0.01


def test_relative_mode_matches_absolute():
    # scale_length of this box is its half-length 0.25
    K = AxisBox([0.2], [0.7])
    fam_abs = CapacityFamilyConfig((0.125, 0.0625), resolution=128)
    fam_rel = CapacityFamilyConfig((0.5, 0.25), resolution=32, relative=True)
    a = capacity_family(K, P11, fam_abs)
    b = capacity_family(K, P11, fam_rel)
    for (ea, va), (eb, vb) in zip(a, b):
        assert ea == pytest.approx(eb)
        assert va == pytest.approx(vb, rel=1e-10)


def test_unresolved_scale_reports_resolution():
    fam = CapacityFamilyConfig((0.5, 0.01), resolution=64)
    with pytest.raises(UnresolvedScale, match="need >= 200"):
        besov_capacity_upper(UNIT, P11, fam)


def test_golden_section_never_worse_than_grid():
    fam = CapacityFamilyConfig((0.5, 0.25, 0.125, 0.0625), resolution=64)
    grid = besov_capacity_upper(UNIT, P11, fam).value
    gold = besov_capacity_upper(UNIT, P11, CapacityFamilyConfig(
        fam.eps_grid, optimizer=GoldenSection(0.05), resolution=64)).value
    assert gold <= grid


def test_family_config_validation():
    with pytest.raises(ValueError):
        CapacityFamilyConfig((0.1, 0.2))
    with pytest.raises(ValueError):
        CapacityFamilyConfig((1.5,))
    with pytest.raises(ValueError):
        SmoothPoly(4)


# ---------------------------------------------------------------------------
# covering content

def test_netrusov_single_ball():
    assert netrusov_upper(Ball([0.0], 0.25), 1.0, 1.0) == pytest.approx(0.25)


def test_netrusov_two_balls():
    E = DisjointUnion((Ball([-0.5], 0.125), Ball([0.5], 0.125)))
    assert netrusov_upper(E, 1.0, 1.0) <= 0.25 + 1e-12


@pytest.mark.parametrize("theta", [1.0, 10.0, 100.0])
def test_netrusov_one_term_is_theta_free(theta):
    assert netrusov_upper(Ball([0.0, 0.0], 0.5), 1.5, theta) == pytest.approx(0.5**1.5)


def test_netrusov_monotone_in_eps():
    E = DisjointUnion((Ball([-0.5, 0.0], 0.2), AxisBox([0.1, -0.2], [0.4, 0.2])))
    vals = [netrusov_upper(E, 1.2, 1.0, eps) for eps in (math.inf, 0.25, 0.125, 0.0625)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_netrusov_limit_is_stated():
    with pytest.raises(ValueError, match="below the smallest covering radius"):
        netrusov_upper(Ball([0.0, 0.0], 0.5), 1.0, 1.0, eps=1e-4)


# ---------------------------------------------------------------------------
# capacitary Lorentz norm

def _cap():
    return CapacityEstimate(P11, CapacityFamilyConfig(resolution=128, relative=True))


def test_choquet_of_an_indicator():
    f = digitize(Ball([0.0], 1.0), 1 / 32, value=2.0)
    cap = _cap()
    c = cap.value(support_level(f).geometry)
    got = choquet_lorentz_norm(f, LorentzParams(1.0, 1 / 0.7), cap)
    assert got == pytest.approx(2.0 * c, rel=1e-12)


def test_choquet_of_zero():
    f = make_corpus(CorpusSpec(("bump",), 1, 16))[0][1].scaled(0.0)
    assert choquet_lorentz_norm(f, LorentzParams(1.0, 2.0), _cap()) == 0.0


def test_choquet_tent_finite_and_above_lebesgue():
    f = make_corpus(CorpusSpec(("tent",), 1, 64))[0][1]
    r = 1 / 0.7
    cap = choquet_lorentz_norm(f, LorentzParams(1.0, r), _cap())
    leb = lorentz_norm(f, LorentzParams(r, r), LebesgueVolume())
    assert math.isfinite(cap) and cap / leb > 0


def test_choquet_monotone():
    c = dict(make_corpus(CorpusSpec(("tent", "trunc_power"), 1, 64)))
    cap = _cap()
    lp = LorentzParams(1.0, 1 / 0.7)
    assert choquet_lorentz_norm(c["trunc_power"], lp, cap) <= choquet_lorentz_norm(c["tent"], lp, cap)


def test_choquet_rejects_non_radial():
    f = make_corpus(CorpusSpec(("two_bump",), 1, 32))[0][1]
    with pytest.raises(NotEvaluable):
        choquet_lorentz_norm(f, LorentzParams(1.0, 2.0), _cap())


def test_netrusov_content_as_capacity():
    f = make_corpus(CorpusSpec(("tent",), 1, 32))[0][1]
    v = choquet_lorentz_norm(f, LorentzParams(1.0, 1.0), NetrusovContent(0.7, 1.0))
    assert math.isfinite(v) and v > 0
