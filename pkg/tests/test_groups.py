import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapdist.errors import BallNotSaturated, InvalidQ, UpperTriangular
from gapdist.groups import (
    GoodCoords,
    GroupElement,
    IwasawaCoords,
    gamma_generators,
    good_census,
    good_decompose,
    hecke_generators,
    hecke_relation_error,
    iwasawa_decompose,
    normality_check,
    projective_error,
    word_ball,
)

R2, R5 = math.sqrt(2), math.sqrt(5)


def M(a, b, c, d):
    return np.array([[a, b], [c, d]], dtype=float)


def inv(m):
    return np.linalg.inv(m)


def test_generators():
    g = [e.matrix for e in gamma_generators("classical")]
    assert np.array_equal(g[0], M(1, 2, 0, 1)) and np.array_equal(g[1], M(1, 0, 2, 1))
    g = [e.matrix for e in gamma_generators("ap3")]
    assert np.allclose(g[2], M(3, -2 * R2, -2 * R2, 3))
    entries = {round(abs(x), 12) for e in gamma_generators("ap9") for x in e.matrix.ravel()}
    assert entries <= {round(v, 12) for v in (0, 1, 1 + R5, 2 + R5, 3 + R5)}


@pytest.mark.parametrize("q, lam", [(3, 1.0), (4, R2), (5, (1 + R5) / 2)])
def test_hecke(q, lam):
    S, T = hecke_generators(q)
    assert T[0, 1] == pytest.approx(lam)
    assert hecke_relation_error(q) <= 1e-12


def test_invalid_q():
    with pytest.raises(InvalidQ):
        hecke_generators(2)
    with pytest.raises(InvalidQ):
        hecke_generators(3.5)


def test_displayed_identities():
    # computed here by direct multiplication
    S, T4 = hecke_generators(4)
    g1, g2, g3 = (e.matrix for e in gamma_generators("ap3"))
    assert projective_error(T4 @ g2 @ inv(T4), -g1 @ g3) <= 1e-12
    _, T5 = hecke_generators(5)
    h1, h2, h3, _ = (e.matrix for e in gamma_generators("ap9"))
    assert projective_error(T5 @ h3 @ inv(T5), -h1 @ inv(h2)) <= 1e-12
    S3, _ = hecke_generators(3)
    c1, c2 = (e.matrix for e in gamma_generators("classical"))
    assert projective_error(S3 @ c1 @ inv(S3), inv(c2)) <= 1e-12


@pytest.mark.parametrize("kind", ["classical", "ap3", "ap9"])
def test_normality_report(kind):
    rep = normality_check(kind)
    assert rep.ok and len(rep.checks) >= 3
    assert "all identities hold" in str(rep)


@pytest.mark.parametrize("kind, q", [("classical", 3), ("ap3", 4), ("ap9", 5)])
def test_conjugates_lie_in_group(kind, q):
    # independent of the identity list: search a word ball for each conjugate
    gens = gamma_generators(kind)
    ball = word_ball(gens, 3)
    S, T = hecke_generators(q)
    for g in gens:
        for X in (S, T):
            conj = X @ g.matrix @ inv(X)
            err = min(projective_error(conj, b) for b in ball)
            assert err <= 1e-9


def test_group_element():
    g = GroupElement(M(-1, 0, 0, -1))
    assert np.array_equal(g.matrix, np.eye(2))
    with pytest.raises(ValueError):
        GroupElement(M(1, 1, 1, 1))
    a = gamma_generators("classical")[0]
    assert np.allclose((a @ a.inverse()).matrix, np.eye(2))


def test_iwasawa_identity():
    c = iwasawa_decompose(np.eye(2))
    assert (c.x, c.y, c.theta) == (0.0, 1.0, 0.0)


def _random_sl2(rng):
    a, b, c = rng.normal(size=3)
    while abs(a) < 0.05:
        a = rng.normal()
    return M(a, b, c, (1 + b * c) / a)


def test_iwasawa_roundtrip():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        g = _random_sl2(rng)
        k = iwasawa_decompose(g)
        assert 0 <= k.theta < math.pi and k.y > 0
        assert projective_error(k.compose(), g) <= 1e-9


def test_good_roundtrip():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        g = _random_sl2(rng)
        k = good_decompose(g)
        assert projective_error(k.compose(), g) <= 1e-9 * max(1, np.abs(g).max() ** 2)
    with pytest.raises(UpperTriangular):
        good_decompose(M(1, 3, 0, 1))


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(0.01, 20), st.floats(0, math.pi, exclude_max=True))
def test_iwasawa_compose_decompose(x, y, theta):
    k = iwasawa_decompose(IwasawaCoords(x, y, theta).compose())
    assert k.x == pytest.approx(x, abs=1e-9) and k.y == pytest.approx(y, rel=1e-9)
    assert min(abs(k.theta - theta), math.pi - abs(k.theta - theta)) < 1e-9


def test_good_coords_compose():
    g = GoodCoords(0.3, -1.2, 4.0).compose()
    assert g[1, 0] == pytest.approx(2.0)
    k = good_decompose(g)
    assert (k.theta1, k.theta2, k.nu) == pytest.approx((0.3, -1.2, 4.0))


def test_word_ball_growth():
    gens = gamma_generators("classical")
    sizes = [len(word_ball(gens, r)) for r in range(4)]
    # free group on two generators: 1, 5, 17, 53
    assert sizes == [1, 5, 17, 53]


def test_census_empty_interval():
    n, pred = good_census("classical", 50, I=(0.5, 0.5))
    assert n == 0 and pred == 0


def test_census_doubling():
    n25, _ = good_census("classical", 25)
    n50, _ = good_census("classical", 50)
    assert 1.6 <= n50 / n25 <= 2.4


def test_census_unsaturated():
    with pytest.raises(BallNotSaturated):
        good_census("classical", 5000, max_word_len=2)
