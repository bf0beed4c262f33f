import json
import math

import numpy as np
import pytest
from scipy import integrate

from gapdist.config import build_config, packing_constant
from gapdist.enumeration import enumerate_tangencies
from gapdist.errors import BudgetExceeded, InvalidPair
from gapdist.regions import (
    BilinearConstraint,
    LinearForm,
    Region,
    exact_area,
    monte_carlo_area,
    quadtree_area,
    region_area,
)
from gapdist.stats import normalized_gaps
from gapdist.theory import (
    branches,
    build_regions,
    density,
    limiting_F,
    pair_class,
    pair_component_F,
    pairs,
    support_threshold,
    total_mass,
)

R2, R5 = math.sqrt(2), math.sqrt(5)
PHI = (1 + R5) / 2
H = R2 / 2


# Oracle: the closed-form pair regions, integrated as 1-D integrals over c of
# the length of the d-interval.  Every condition is linear in d for fixed c > 0.
# A row (a, b, lo, hi) means lo <= a c + b d <= hi with b != 0; a cutoff row
# (p, sign) means sign * c (p c + d) >= k.


def _d_interval(c, rows, cut, k):
    lo, hi = -np.inf, np.inf
    for a, b, r0, r1 in rows:
        x0, x1 = (r0 - a * c) / b, (r1 - a * c) / b
        if b < 0:
            x0, x1 = x1, x0
        lo, hi = max(lo, x0), min(hi, x1)
    if cut is not None:
        p, sign = cut
        bound = sign * k / c - p * c
        if sign > 0:
            lo = max(lo, bound)
        else:
            hi = min(hi, bound)
    return max(0.0, hi - lo)


def oracle_area(rows, cut, k, cmax=H):
    val, _ = integrate.quad(lambda c: _d_interval(c, rows, cut, k), 1e-15, cmax,
                            limit=400, epsabs=1e-11, epsrel=0)
    return val


INF = np.inf


def classical_F(s):
    k = packing_constant(build_config("classical")) / s
    z1 = [(0, 1, 0, H), (1, 1, H, INF)]
    return 4 * oracle_area(z1, (0, 1), k)


def ap3_F(s):
    k = packing_constant(build_config("ap3")) / s
    z1 = [(0, R2, 0, 1), (R2, 2, 1, INF), (2, R2, 1, INF)]
    z3 = [(R2, 2, 0, 1), (2, R2, 1, INF)]
    z4 = [(R2, 2, -1, 0), (0, R2, -INF, -1)]
    return R2 * (2 * oracle_area(z1, (0, 1), k) + oracle_area(z3, (H, 1), k) + oracle_area(z4, (H, -1), k))


def ap9_F(s):
    k = packing_constant(build_config("ap9")) / s
    z1 = [(0, 1, 0, H), (1, PHI, H, INF), (PHI, 1, H, INF)]
    z3 = [(1, PHI, 0, H), (PHI, 1, H, INF), (PHI, PHI, H, INF)]
    z4 = [(1, PHI, -H, 0), (0, 1, -INF, -H)]
    p = (R5 - 1) / 2
    return 8 / (R5 + 1) * (oracle_area(z1, (0, 1), k) + oracle_area(z3, (p, 1), k) + oracle_area(z4, (p, -1), k))


ORACLES = {"classical": classical_F, "ap3": ap3_F, "ap9": ap9_F}
S_VALUES = [0.25, 0.29, 0.31, 0.4, 0.7, 1.0, 1.5, 2.5, 4.0, 10.0]


@pytest.mark.parametrize("kind", ["classical", "ap3", "ap9"])
def test_F_matches_closed_form_regions(kind):
    cfg = build_config(kind)
    F = limiting_F(cfg, S_VALUES)
    ref = np.array([ORACLES[kind](s) for s in S_VALUES])
    assert np.max(np.abs(F.values - ref)) < 1e-8


def test_classical_region_is_Z1():
    cfg = build_config("classical")
    R = next(r for r in build_regions(cfg, 1, 2, 1.0) if "> 0" in r.label)
    rng = np.random.default_rng(3)
    c, d = rng.uniform(-0.1, 0.8, 200_000), rng.uniform(-0.8, 0.8, 200_000)
    z1 = (c > 0) & (c <= H) & (d > 0) & (d <= H) & (c + d >= H) & (c * d >= 3 / (2 * math.pi**2))
    assert np.array_equal(R.contains(c, d), z1)


def test_ap3_disjoint_regions_are_Z3_Z4():
    cfg = build_config("ap3")
    k = R2 / math.pi**2
    regs = build_regions(cfg, 1, 3, 1.0)
    rng = np.random.default_rng(4)
    c, d = rng.uniform(0.001, 0.8, 200_000), rng.uniform(-1.1, 1.1, 200_000)
    L3 = R2 * c + 2 * d
    z3 = (R2 * c <= 1) & (L3 > 0) & (L3 <= 1) & (2 * c + R2 * d >= 1) & (c * (c / R2 + d) >= k)
    z4 = (R2 * c <= 1) & (L3 < 0) & (L3 >= -1) & (R2 * d <= -1) & (c * (c / R2 + d) <= -k)
    got = [r.contains(c, d) for r in regs]
    assert {tuple(np.nonzero(g)[0][:50]) for g in got} == {tuple(np.nonzero(z3)[0][:50]), tuple(np.nonzero(z4)[0][:50])}
    assert sorted(int(g.sum()) for g in got) == sorted([int(z3.sum()), int(z4.sum())])


def test_pair_classes():
    ap3 = build_config("ap3")
    kinds = {(p.i, p.j): p.kind for p in pairs(ap3)}
    assert kinds == {(1, 2): "tangent", (2, 3): "tangent", (3, 4): "tangent", (1, 4): "tangent",
                     (1, 3): "disjoint", (2, 4): "disjoint"}
    assert pair_class(ap3, 3, 1).weight == 2
    with pytest.raises(InvalidPair):
        pair_class(ap3, 2, 2)


@pytest.mark.parametrize("kind, delta", [
    ("classical", 3 / math.pi**2),
    ("ap3", 2 * R2 / math.pi**2),
    ("ap9", 5 * (1 + R5) / (6 * math.pi**2)),
])
def test_support_threshold(kind, delta):
    cfg = build_config(kind)
    assert abs(support_threshold(cfg) - delta) < 1e-9
    below = support_threshold(cfg) * 0.999
    for p in pairs(cfg):
        for r in build_regions(cfg, p.i, p.j, below):
            assert exact_area(r) == 0


def test_F_vanishes_below_delta(any_cfg):
    d = support_threshold(any_cfg)
    F = limiting_F(any_cfg, np.linspace(0, d, 50))
    assert np.all(F.values == 0)
    assert limiting_F(any_cfg, [d * 1.01]).values[0] > 0


def test_mass_and_monotone(any_cfg):
    assert abs(total_mass(any_cfg) - 1) < 1e-12
    assert 0.999 <= limiting_F(any_cfg, [1e4]).values[0] <= 1.0005
    F = limiting_F(any_cfg)
    assert np.all(np.diff(F.values) >= -1e-15)


def test_classical_component_identity():
    cfg = build_config("classical")
    g = np.linspace(0.2, 6, 40)
    F = limiting_F(cfg, g)
    z1 = [pair_component_F(cfg, 1, 2, g)]
    assert np.allclose(F.values, 3 * z1[0].values, atol=1e-14)


def test_Z1_without_cutoff_quadtree():
    cfg = build_config("classical")
    R = next(r for r in build_regions(cfg, 1, 2, math.inf) if "> 0" in r.label)
    est = quadtree_area(R, tol=1e-6)
    assert abs(est.area - 0.25) <= 1e-6
    assert abs(exact_area(R) - 0.25) <= 1e-14


def test_unit_square():
    sq = Region([BilinearConstraint.linear(LinearForm(1, 0), ">=", 0)], (0, 1, 0, 1))
    assert region_area(sq) == pytest.approx(1, abs=1e-6)
    assert exact_area(sq) == pytest.approx(1, abs=1e-14)


def test_disc_quadrant():
    # c^2 + d^2 <= 1 is not bilinear, but c d >= 1/4 inside the unit square is
    R = Region([BilinearConstraint(LinearForm(1, 0), LinearForm(0, 1), ">=", 0.25)], (0, 1, 0, 1))
    ref = 0.75 - 0.25 * math.log(4)
    assert exact_area(R) == pytest.approx(ref, abs=1e-14)
    assert abs(quadtree_area(R, tol=1e-7).area - ref) <= 1e-7


def test_quadtree_budget():
    R = Region([BilinearConstraint(LinearForm(1, 0), LinearForm(0, 1), ">=", 0.25)], (0, 1, 0, 1))
    with pytest.raises(BudgetExceeded):
        quadtree_area(R, tol=1e-12, max_cells=1000)


@pytest.mark.parametrize("kind", ["classical", "ap3", "ap9"])
def test_routes_agree(kind):
    cfg = build_config(kind)
    for p in pairs(cfg):
        for s in (0.5, 2.0):
            for r in build_regions(cfg, p.i, p.j, s):
                ex = exact_area(r)
                assert abs(quadtree_area(r, tol=1e-7).area - ex) < 1e-7
                mc, sigma = monte_carlo_area(r, n=2**20, seed=1)
                assert abs(mc - ex) < 2e-3


def test_monte_carlo_F(classical):
    g = [0.5, 1.0, 3.0, math.inf]
    a = limiting_F(classical, g, method="montecarlo", seed=5, mc_samples=2**20)
    b = limiting_F(classical, g)
    assert np.max(np.abs(a.values - b.values)) < 2e-3
    c = limiting_F(classical, g, method="montecarlo", seed=5, mc_samples=2**20)
    assert np.array_equal(a.values, c.values)


def test_quadtree_F(ap3):
    g = [0.3, 0.8, 2.0]
    a = limiting_F(ap3, g, method="quadtree", tol=1e-6)
    b = limiting_F(ap3, g)
    assert np.max(np.abs(a.values - b.values)) <= 1e-6


@pytest.mark.parametrize("kind, classes", [
    ("classical", [[(1, 2), (1, 3), (2, 3)]]),
    ("ap3", [[(1, 2), (2, 3), (3, 4), (1, 4)], [(1, 3), (2, 4)]]),
    ("ap9", [[(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)], [(1, 3), (2, 4), (3, 5), (1, 4), (2, 5)]]),
])
def test_component_symmetry(kind, classes):
    cfg = build_config(kind)
    tol = 1e-6
    g = np.linspace(0, 6, 120)
    for cls in classes:
        comps = [pair_component_F(cfg, i, j, g, tol).values for i, j in cls]
        for v in comps[1:]:
            assert np.max(np.abs(v - comps[0])) <= 2 * tol


def test_density_zero_below_delta(any_cfg):
    d = support_threshold(any_cfg)
    g = np.linspace(0, 6, 601)
    f = density(any_cfg, g)
    assert np.all(f.values[g < d - 0.011] == 0)
    assert np.all(f.values >= -1e-12)


def test_density_against_farey_histogram(classical):
    Q = 300
    tg = enumerate_tangencies(classical, 2 * Q * Q, (0, 1))
    gaps = normalized_gaps(tg, (0, 1))
    edges = np.linspace(0, 6, 61)
    hist, _ = np.histogram(gaps, bins=edges)
    hist = hist / (len(gaps) * 0.1)
    F = limiting_F(classical, edges)
    theory = np.diff(F.values) / 0.1
    assert np.max(np.abs(hist - theory)) <= 0.05


def test_regions_serialize(ap9):
    for r in build_regions(ap9, 1, 3, 1.0):
        d = json.loads(json.dumps(r.to_dict()))
        assert len(d["constraints"]) == len(r.constraints)
    assert len(branches(ap9, 1, 3)) == 2


def test_scaled_constraint():
    k = BilinearConstraint(LinearForm(1, 0, 0.5), LinearForm(0, 1, 0), ">=", 0.25)
    k2 = k.scaled_by(2.0)
    assert k.holds(0.3, 1.0) == k2.holds(0.6, 2.0)
    assert k.holds(0.1, 0.2) == k2.holds(0.2, 0.4)
