import math

import numpy as np
import pytest

from besovlab.core import (
    CORPUS_CATALOG,
    BesovParams,
    CorpusSpec,
    GridFunction,
    LorentzParams,
    corpus_function,
    digitize,
    dilate,
    make_corpus,
    superlevel_set,
    support_level,
)
from besovlab.geometry import AxisBox, Ball, DisjointUnion, normalized, unit_ball_volume


@pytest.mark.parametrize("beta,p,q,n", [
    (0.3, 1, 1, 1), (0.2, 2, 2, 1), (0.3, 1, 2, 1), (1.5, 1, 1, 2),
    (0.5, 0.8, 0.8, 1), (0.6, 0.75, 0.75, 1), (0.5, 0.9, 0.9, 3),
])
def test_params_accepted(beta, p, q, n):
    P = BesovParams(beta, p, q, n)
    assert P.k == 1 + math.floor(beta)
    assert P.regime == ("A" if p >= 1 else "B")


@pytest.mark.parametrize("beta,p,q,n,msg", [
    (0.5, 2, 2, 1, "p < n/beta"),
    (1.2, 1, 1, 1, "beta < n"),
    (0.5, 0.8, 0.9, 1, "p = q"),
    (0.5, 0.6, 0.6, 1, r"n/\(n\+beta\)"),
    (1.0, 1, 1, 2, "integer"),
    (2.5, 1, 1, 3, "not supported"),
    (0.3, 1, -1, 1, "> 0"),
])
def test_params_rejected_with_reason(beta, p, q, n, msg):
    with pytest.raises(ValueError, match=msg):
        BesovParams(beta, p, q, n)


def test_non_strict_params_skip_regime():
    P = BesovParams(0.5, 2, 2, 1, strict=False)
    assert P.regime == "-"
    assert P.with_dim(2).strict is False


def test_sobolev_exponent():
    assert BesovParams(0.3, 1, 1, 1).sobolev_exponent == pytest.approx(1 / 0.7)
    assert BesovParams(0.5, 1.5, 2, 3).sobolev_exponent == pytest.approx(4.5 / 2.25)


def test_lorentz_params():
    assert LorentzParams(2.0).weak
    with pytest.raises(ValueError):
        LorentzParams(0.0, 1.0)


def test_grid_function_requires_zero_boundary():
    with pytest.raises(ValueError, match="boundary"):
        GridFunction(np.ones(5), 0.1, np.zeros(1))


def test_corpus_shapes_and_peaks():
    spec = CorpusSpec(tuple(CORPUS_CATALOG), dim=2, resolution=16)
    corpus = dict(make_corpus(spec))
    assert set(corpus) == set(CORPUS_CATALOG)
    for f in corpus.values():
        assert f.shape == (81, 81)
    assert corpus["bump"].max_abs == pytest.approx(math.exp(-1))
    assert corpus["two_bump"].max_abs == pytest.approx(1.0)
    assert corpus["plateau"].max_abs == 1.0


def test_corpus_rejects_unknown_entry():
    with pytest.raises(ValueError, match="catalog"):
        CorpusSpec(("gauss",))
    with pytest.raises(ValueError):
        corpus_function("trunc_power:0.5", np.zeros((1, 1)))


def test_dilate_default_is_exact_relabelling():
    f = make_corpus(CorpusSpec(("tent",), 1, 32))[0][1]
    g = dilate(f, 2.0)
    assert g.spacing == f.spacing / 2
    np.testing.assert_array_equal(g.values, f.values)


def test_dilate_resampled_matches_closed_form():
    f = make_corpus(CorpusSpec(("tent",), 1, 32))[0][1]
    g = dilate(f, 2.0, spacing=f.spacing)
    x = g.centers()
    np.testing.assert_allclose(g.values, corpus_function("tent", 2 * x), atol=1e-12)


def test_digitize_volume():
    h = 1 / 64
    f = digitize(Ball(np.zeros(2), 0.5), h)
    vol = f.values.sum() * h**2
    assert vol == pytest.approx(unit_ball_volume(2) * 0.25, rel=0.02)


def test_superlevel_recognizes_ball_box_and_union():
    h = 1 / 32
    ball = superlevel_set(digitize(Ball(np.zeros(2), 0.5), h), 0.5)
    assert isinstance(ball.geometry, Ball)
    assert ball.geometry.radius == pytest.approx(0.5, rel=0.05)

    box = superlevel_set(digitize(AxisBox([-0.3, -0.2], [0.4, 0.1]), h), 0.5)
    assert isinstance(box.geometry, AxisBox)

    two = make_corpus(CorpusSpec(("two_bump",), 1, 64))[0][1]
    lvl = support_level(two, 0.0)
    assert isinstance(lvl.geometry, DisjointUnion)
    assert len(lvl.geometry.members) == 2


def test_superlevel_threshold_must_be_positive():
    f = make_corpus(CorpusSpec(("bump",), 1, 16))[0][1]
    with pytest.raises(ValueError):
        superlevel_set(f, 0.0)
    assert support_level(f).count == np.count_nonzero(f.values)


def test_normalized_round_trip():
    E = AxisBox([1.0, 2.0], [3.0, 2.5])
    E0, shift, L = normalized(E)
    back = E0.scaled(L).translated(shift)
    np.testing.assert_allclose(back.lo, E.lo)
    np.testing.assert_allclose(back.hi, E.hi)


def test_union_rejects_overlap():
    with pytest.raises(ValueError, match="overlap"):
        DisjointUnion((Ball([0.0], 1.0), Ball([1.5], 1.0)))
