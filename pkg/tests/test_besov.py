import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from besovlab.besov import (
    BesovQuadConfig,
    besov_seminorm,
    finite_difference,
    lp_norm,
    sphere_directions,
)
from besovlab.core import BesovParams, CorpusSpec, GridFunction, dilate, make_corpus


def unit_interval(res: int, pad: int = 4) -> GridFunction:
    """Exact piecewise-constant indicator of [0, 1]: cells tile the interval."""
    h = 1 / res
    v = np.zeros(res + 2 * pad)
    v[pad:pad + res] = 1.0
    return GridFunction(v, h, np.array([h / 2 - pad * h]))


def corpus(name, dim=1, res=64):
    return make_corpus(CorpusSpec((name,), dim, res))[0][1]


@pytest.mark.parametrize("beta", [0.2, 0.3, 0.5, 0.8])
def test_indicator_p1_closed_form(beta):
    # |1_I|_{p=q=1} = 2 * int_I int_{I^c} |x-y|^{-1-beta} = 4 / (beta (1 - beta))
    P = BesovParams(beta, 1, 1, 1, strict=False)
    got = besov_seminorm(unit_interval(128), P)
    assert got == pytest.approx(4 / (beta * (1 - beta)), rel=2e-3)


@pytest.mark.parametrize("beta", [0.1, 0.2, 0.3, 0.4])
def test_indicator_p2_closed_form(beta):
    # squared norm is twice the (2 beta)-perimeter of the interval
    exact = math.sqrt(2 * 2 / (2 * beta * (1 - 2 * beta)))
    got = besov_seminorm(unit_interval(128), BesovParams(beta, 2, 2, 1, strict=False))
    assert got == pytest.approx(exact, rel=1e-3)


def test_tent_coarea_closed_form():
    # superlevel sets of the tent are intervals of length 2(1-t)
    beta = 0.3
    exact = 4 * 2 ** (1 - beta) / (beta * (1 - beta) * (2 - beta))
    got = besov_seminorm(corpus("tent"), BesovParams(beta, 1, 1, 1))
    assert got == pytest.approx(exact, rel=1e-3)


@pytest.mark.parametrize("name", ["bump", "tent", "two_bump", "plateau"])
@pytest.mark.parametrize("beta,p,q", [(0.3, 1, 1), (0.2, 2, 2), (0.3, 1, 2), (0.5, 0.8, 0.8)])
def test_dilation_is_exact(name, beta, p, q):
    P = BesovParams(beta, p, q, 1)
    f = corpus(name, res=32)
    ratio = besov_seminorm(dilate(f, 2.0), P) / besov_seminorm(f, P)
    assert ratio == pytest.approx(2 ** (beta - 1 / p), rel=1e-10)


def test_second_order_difference_for_beta_above_one():
    P = BesovParams(1.5, 1, 1, 2)
    assert P.k == 2
    f = corpus("bump", dim=2, res=16)
    v = besov_seminorm(f, P)
    assert math.isfinite(v) and v > 0


def test_two_dimensional_refinement_converges():
    P = BesovParams(0.3, 1, 1, 2)
    a = besov_seminorm(corpus("bump", 2, 16), P)
    b = besov_seminorm(corpus("bump", 2, 32), P)
    assert abs(a / b - 1) < 0.02


def test_finite_difference_orders():
    f = corpus("tent", res=16)
    d1 = finite_difference(f, [0.25], 1)
    d2 = finite_difference(f, [0.25], 2)
    assert d1.values.sum() == pytest.approx(0.0, abs=1e-12)
    assert d2.values.sum() == pytest.approx(0.0, abs=1e-12)


def test_lp_norm_oracle():
    # int_{-1}^{1} (1-|x|)^2 dx = 2/3, midpoint rule error O(h^2)
    assert lp_norm(corpus("tent", res=128), 2) ** 2 == pytest.approx(2 / 3, rel=1e-4)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sphere_rule_weights_sum_to_area(n):
    dirs, w = sphere_directions(n)
    area = {1: 2, 2: 2 * math.pi, 3: 4 * math.pi}[n]
    assert w.sum() == pytest.approx(area)
    np.testing.assert_allclose(np.linalg.norm(dirs, axis=1), 1.0)


def test_quad_config_validation():
    with pytest.raises(ValueError):
        BesovQuadConfig(radial_points=4)
    with pytest.raises(ValueError):
        BesovQuadConfig(r_min=1.0, r_max=0.5)


def test_zero_function():
    f = corpus("bump", res=16).scaled(0.0)
    assert besov_seminorm(f, BesovParams(0.3, 1, 1, 1)) == 0.0


@settings(max_examples=25, deadline=None)
@given(c=st.floats(0.01, 100), shift=st.integers(-10, 10))
def test_homogeneous_and_translation_invariant(c, shift):
    P = BesovParams(0.4, 1.5, 1.5, 1)
    f = corpus("trunc_power", res=32)
    base = besov_seminorm(f, P)
    moved = f.with_values(np.roll(f.values, shift))
    assert besov_seminorm(f.scaled(c), P) == pytest.approx(c * base, rel=1e-10)
    assert besov_seminorm(moved, P) == pytest.approx(base, rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(vals=st.lists(st.floats(-5, 5), min_size=3, max_size=20))
def test_nonnegative_on_random_functions(vals):
    v = np.concatenate([[0.0], vals, [0.0]])
    f = GridFunction(v, 0.1, np.zeros(1))
    assert besov_seminorm(f, BesovParams(0.3, 1, 2, 1)) >= 0.0
