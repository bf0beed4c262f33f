import math

import numpy as np
import pytest
from oracles import farey
from hypothesis import given, settings
from hypothesis import strategies as st

from gapdist.enumeration import Tangencies, enumerate_tangencies
from gapdist.errors import ArcThroughInfinity, GridMismatch, TooFewPoints
from gapdist.geom import GeneralizedCircle as GC
from gapdist.geom import MobiusMap, mobius_apply_circle
from gapdist.stats import (
    EmpiricalCDF,
    arc_length,
    conformal_pushforward,
    gap_cdf,
    ks_distance,
    min_normalized_gap,
    normalized_gaps,
)
from gapdist.theory import limiting_F

GRID = np.linspace(0, 6, 600)


def test_equally_spaced_step():
    pts = np.arange(16) / 16  # dyadic, so gaps are exact
    F = gap_cdf(pts, (0, 1), np.array([0.0, 0.5, 0.999, 1.0, 2.0]))
    assert list(F.values) == [0, 0, 0, 1, 1]


def test_two_points_single_gap():
    g = normalized_gaps([0.25, 0.75], (0, 1))
    assert g.tolist() == [1.0]


def test_too_few_points():
    with pytest.raises(TooFewPoints):
        normalized_gaps([0.5], (0, 1))


def test_points_outside_interval_ignored():
    g = normalized_gaps([-1.0, 0.0, 0.5, 1.0], (0, 1))
    assert g.tolist() == [1.0]


def test_ks_trivial():
    s = np.linspace(0, 3, 301)
    F1 = EmpiricalCDF(s, (s >= 1).astype(float), 0)
    F2 = EmpiricalCDF(s, (s >= 2).astype(float), 0)
    assert ks_distance(F1, F1) == 0
    assert ks_distance(F1, F2) == 1


def test_ks_different_grids():
    a = EmpiricalCDF(np.linspace(0, 1, 11), np.linspace(0, 1, 11), 0)
    b = EmpiricalCDF(np.linspace(0, 1, 7), np.linspace(0, 1, 7), 0)
    assert ks_distance(a, b) == pytest.approx(0, abs=1e-15)
    c = EmpiricalCDF(np.linspace(2, 3, 5), np.ones(5), 0)
    with pytest.raises(GridMismatch):
        ks_distance(a, c)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=3, max_size=60, unique=True))
def test_cdf_properties(pts):
    F = gap_cdf(pts, (0, 1), GRID)
    assert np.all(np.diff(F.values) >= 0)
    assert 0 <= F.values[0] and F.values[-1] <= 1
    # the normalized gaps have mean (span / length) * n / (n - 1) <= n / (n - 1)
    g = normalized_gaps(pts, (0, 1))
    assert g.mean() <= len(pts) / (len(pts) - 1) + 1e-12


def test_farey_gap_cdf_oracle(classical):
    Q = 300
    tg = enumerate_tangencies(classical, 2 * Q * Q, (0, 1))
    fr = farey(Q)
    gaps = np.array([float(b - a) for a, b in zip(fr, fr[1:])]) * len(fr)
    ref = np.searchsorted(np.sort(gaps), GRID, side="right") / len(gaps)
    F = gap_cdf(tg, (0, 1), GRID)
    assert ks_distance(F, EmpiricalCDF(GRID, ref, len(fr))) == 0
    assert np.all(F.values[GRID <= 0.95 * 3 / math.pi**2] == 0)
    assert min_normalized_gap(tg, (0, 1)) >= 0.95 * 3 / math.pi**2


def test_min_gap_ap3(ap3):
    tg = enumerate_tangencies(ap3, 1e5, (0, ap3.period_t))
    assert min_normalized_gap(tg) >= 0.95 * 2 * math.sqrt(2) / math.pi**2


# pushforward ---------------------------------------------------------------


def test_identity_pushforward(ap3):
    a = conformal_pushforward(ap3, MobiusMap.identity(), 2e4, (0.1, 1.7))
    b = enumerate_tangencies(ap3, 2e4, (0.1, 1.7))
    assert np.allclose(a.alpha, b.alpha, rtol=0, atol=1e-14)
    assert np.allclose(a.kappa, b.kappa, rtol=1e-12)


def test_arc_length_closed_form():
    M = MobiusMap(1, 0, 1, 1)
    # |M'(x)| = 1/(x+1)^2, integral over [0, 1] is 1/2
    assert arc_length(M, 0.0, 1.0) == pytest.approx(0.5)
    M = MobiusMap(1, 0, 1j, 1)  # |M'(x)| = 1/(1+x^2)
    assert arc_length(M, -1.0, 1.0) == pytest.approx(math.pi / 2)


def test_arc_through_infinity(classical):
    with pytest.raises(ArcThroughInfinity):
        conformal_pushforward(classical, MobiusMap(0, -1, 1, 0), 100, (-1, 1))


def test_pushforward_curvatures(classical):
    M = MobiusMap(1, 0, 1, 1)
    tg = conformal_pushforward(classical, M, 2e4, (0.2, 0.9))
    assert np.all(tg.kappa <= 2e4)
    # the image curvature is kappa / |M'(alpha)| up to an O(1) correction
    base = enumerate_tangencies(classical, 2e4 * 4, (0.2, 0.9))
    rng = np.random.default_rng(0)
    idx = rng.choice(len(base), 1000, replace=False)
    worst = 0.0
    for k in idx:
        a, kap = base.alpha[k], base.kappa[k]
        exact = mobius_apply_circle(M, GC.tangent_to_axis(a, 1 / kap)).curvature
        first = kap / M.derivative_abs(a)
        worst = max(worst, abs(exact - first) / first * kap)
    assert worst < 50


def test_pushforward_transfer(classical):
    M = MobiusMap(1, 0, 1, 1)
    tg = conformal_pushforward(classical, M, 1e5, (0.2, 0.9))
    F = limiting_F(classical, GRID)
    assert ks_distance(gap_cdf(tg, grid=GRID), F) <= 0.03


def test_from_arrays_pipeline():
    tg = Tangencies.from_arrays([0.0, 0.25, 0.5, 0.75], [1, 1, 1, 1], interval=(0, 1))
    assert gap_cdf(tg).values[GRID >= 1].min() == 1
