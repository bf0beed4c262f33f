"""Limiting gap distribution as a weighted sum of plane-region areas.

For a pair ``(C_i, C_j)`` of configuration circles, neighbouring tangencies of
the form ``gamma C_i, gamma C_j`` correspond to bottom rows ``(c, d)`` of
``gamma`` in a region of the half plane ``c >= 0``.  Writing
``L_k = alpha_k c + d`` (and ``L_1 = c`` for the top line, whose formal
radius is 1/2), the curvature of ``gamma C_k`` is ``L_k^2 / r_k``.  At unit
curvature bound the region is cut out by

* ``L_i^2 <= r_i`` and ``L_j^2 <= r_j``;
* a sign branch of ``L_i L_j`` (or of ``L_i`` when ``j`` is the top line);
* ``L_l^2 > r_l`` for every circle that lands between the pair in that
  branch, or, when none does, the same for the circles reflected through the
  gap of the tangent pair;
* the gap cutoff ``|L_i L_j| >= |alpha_i - alpha_j| c_P / s`` (``c |L_i| >=
  c_P / s`` for the top line).

``F(s) = (2/D) * sum over pairs of weight * area`` with weight 1 for tangent
and 2 for disjoint pairs.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import FordConfig, cusp_areas, packing_constant, pair_reflection, require_valid
from .errors import InvalidPair
from .geom import reflect_circle
from .regions import (
    BilinearConstraint,
    LinearForm,
    Region,
    decompose,
    max_abs_product,
    monte_carlo_area,
    pieces_area,
    quadtree_area,
)

DEFAULT_GRID = np.linspace(0.0, 6.0, 600)


@dataclass(frozen=True)
class PairClass:
    i: int
    j: int
    kind: str  # "tangent" or "disjoint"

    @property
    def weight(self) -> int:
        return 1 if self.kind == "tangent" else 2


@dataclass
class SampledFunction:
    grid: np.ndarray
    values: np.ndarray
    name: str = "F"

    def __call__(self, s):
        return np.interp(s, self.grid, self.values)


@dataclass(frozen=True)
class Branch:
    """One sign branch of a pair region, without the gap cutoff."""

    i: int
    j: int
    sign: int
    constraints: tuple
    box: tuple
    prod: tuple  # (f1, f2) whose product carries the cutoff
    numerator: float  # |alpha_i - alpha_j|, or 1 for the top line
    label: str

    def cutoff(self, s: float, c_p: float):
        if not math.isfinite(s):
            return None
        X = self.numerator * c_p / s
        f1, f2 = self.prod
        if self.sign > 0:
            return BilinearConstraint(f1, f2, ">=", X, "gap cutoff")
        return BilinearConstraint(f1, f2, "<=", -X, "gap cutoff")


def pair_class(cfg: FordConfig, i: int, j: int) -> PairClass:
    if i == j or not (1 <= i <= cfg.h and 1 <= j <= cfg.h):
        raise InvalidPair(f"invalid pair ({i}, {j}) for h = {cfg.h}")
    i, j = min(i, j), max(i, j)
    return PairClass(i, j, "tangent" if cfg.are_adjacent(i, j) else "disjoint")


def pairs(cfg: FordConfig) -> list:
    return [pair_class(cfg, i, j) for i in range(1, cfg.h + 1) for j in range(i + 1, cfg.h + 1)]


def _form(cfg: FordConfig, k: int) -> LinearForm:
    return LinearForm(1.0, 0.0, 0.0) if k == 1 else LinearForm(cfg.alpha(k), 1.0, 0.0)


def _square_bound(f: LinearForm, r: float, rel: str, label: str) -> BilinearConstraint:
    return BilinearConstraint(f, f, rel, r, label)


def _parallelogram_box(fi, ri, fj, rj):
    si, sj = math.sqrt(ri), math.sqrt(rj)
    M = np.array([[fi.u, fi.v], [fj.u, fj.v]])
    pts = [np.linalg.solve(M, [a, b]) for a in (si, -si) for b in (sj, -sj)]
    pts = np.array(pts)
    c0, c1 = max(0.0, pts[:, 0].min()), max(0.0, pts[:, 0].max())
    d0, d1 = pts[:, 1].min(), pts[:, 1].max()
    pad = 1e-12 * max(1.0, c1 - c0, d1 - d0)
    return (c0, c1 + pad, d0 - pad, d1 + pad)


def _reflected_bounds(cfg: FordConfig, i: int, j: int):
    """``(L, r)`` for every ``S_{i,j} C_k``, ``k`` outside the pair."""
    S = pair_reflection(cfg, i, j)
    out = []
    for k in cfg.indices:
        if k in (i, j):
            continue
        K = reflect_circle(S, cfg.circle(k))
        if K.is_line:
            y = -K.C / (2 * K.B.imag)  # Im z = y
            out.append((k, LinearForm(1.0, 0.0, 0.0), 1.0 / (2 * y)))
        else:
            a, r = K.center.real, K.radius
            out.append((k, LinearForm(a, 1.0, 0.0), r))
    return out


@lru_cache(maxsize=None)
def _branches_cached(cfg: FordConfig, i: int, j: int) -> tuple:
    require_valid(cfg)
    pc = pair_class(cfg, i, j)
    i, j = pc.i, pc.j
    fi, fj = _form(cfg, i), _form(cfg, j)
    ri, rj = cfg.radius(i), cfg.radius(j)
    box = _parallelogram_box(fi, ri, fj, rj)
    common = [
        BilinearConstraint.linear(LinearForm(1.0, 0.0, 0.0), ">=", 0.0, "c >= 0"),
        _square_bound(fi, ri, "<=", f"kappa(C{i}) <= 1"),
        _square_bound(fj, rj, "<=", f"kappa(C{j}) <= 1"),
    ]
    others = [k for k in cfg.indices if k not in (i, j)]
    out = []
    for sign in (1, -1):
        if i == 1:
            # top line paired with finite C_j: branch on the sign of L_j
            ai = cfg.alpha(j)
            rel = ">" if sign > 0 else "<"
            sign_con = BilinearConstraint.linear(fj, rel, 0.0, f"L{j} {rel} 0")
            between = [l for l in others if np.sign(cfg.alpha(l) - ai) == sign]
            prod = (fi, fj)
            numer = 1.0
        else:
            ai, aj = cfg.alpha(i), cfg.alpha(j)
            rel = ">" if sign > 0 else "<"
            sign_con = BilinearConstraint(fi, fj, rel, 0.0, f"L{i}*L{j} {rel} 0")
            between = []
            for l in others:
                if l == 1:
                    side = 1.0  # (inf - a_i)(inf - a_j) > 0
                else:
                    side = np.sign((cfg.alpha(l) - ai) * (cfg.alpha(l) - aj))
                if sign == -side:
                    between.append(l)
            prod = (fi, fj)
            numer = abs(ai - aj)
        cons = list(common) + [sign_con]
        if between:
            for l in between:
                cons.append(_square_bound(_form(cfg, l), cfg.radius(l), ">", f"kappa(C{l}) > 1"))
        else:
            if pc.kind != "tangent":
                raise AssertionError("a disjoint pair always has a circle in between")
            for k, f, r in _reflected_bounds(cfg, i, j):
                cons.append(_square_bound(f, r, ">", f"kappa(S{i},{j} C{k}) > 1"))
        label = f"Omega^{{{i},{j}}} {sign_con.label}"
        out.append(Branch(i, j, sign, tuple(cons), box, prod, numer, label))
    return tuple(out)


def branches(cfg: FordConfig, i: int, j: int) -> tuple:
    return _branches_cached(cfg, min(i, j), max(i, j))


def build_regions(cfg: FordConfig, i: int, j: int, s: float) -> list:
    """The sign-branch regions of the pair ``(i, j)`` at gap size ``s``.

    ``s = inf`` drops the gap cutoff.
    """
    if not s > 0:
        raise ValueError("s must be positive")
    c_p = packing_constant(cfg)
    out = []
    for br in branches(cfg, i, j):
        cons = br.constraints
        cut = br.cutoff(s, c_p)
        if cut is not None:
            cons = cons + (cut,)
        out.append(Region(cons, br.box, br.label))
    return out


@lru_cache(maxsize=None)
def _pieces(cfg: FordConfig, i: int, j: int, sign: int):
    br = next(b for b in branches(cfg, i, j) if b.sign == sign)
    return br, decompose(br.constraints, br.box)


def branch_threshold(cfg: FordConfig, br: Branch) -> float:
    """Largest ``s`` at which the branch region is still empty (``inf`` if always)."""
    _, pcs = _pieces(cfg, br.i, br.j, br.sign)
    if not pcs:
        return math.inf
    q = max_abs_product(pcs, *br.prod)
    if q <= 0:
        return math.inf
    return br.numerator * packing_constant(cfg) / q


def support_threshold(cfg: FordConfig) -> float:
    """Repulsion threshold: ``F(s) = 0`` exactly for ``s`` up to this value."""
    require_valid(cfg)
    return min(
        branch_threshold(cfg, br) for p in pairs(cfg) for br in branches(cfg, p.i, p.j)
    )


def _branch_areas(cfg, br: Branch, grid, method, tol, seed=0, mc_samples=2**18):
    c_p = packing_constant(cfg)
    _, pcs = _pieces(cfg, br.i, br.j, br.sign)
    out = np.zeros(len(grid))
    if not pcs:
        return out
    thr = branch_threshold(cfg, br)
    for n, s in enumerate(grid):
        if not s > thr:
            continue
        cut = br.cutoff(s, c_p)
        if method == "exact":
            out[n] = pieces_area(pcs, () if cut is None else (cut,))
        elif method == "quadtree":
            cons = br.constraints + (() if cut is None else (cut,))
            out[n] = quadtree_area(Region(cons, br.box), tol=tol).area
        elif method == "montecarlo":
            cons = br.constraints + (() if cut is None else (cut,))
            out[n] = monte_carlo_area(Region(cons, br.box), mc_samples, seed)[0]
        else:
            raise ValueError(f"unknown method {method!r}")
    return out


def _as_grid(grid):
    g = np.atleast_1d(np.asarray(grid, dtype=float))
    if g.ndim != 1:
        raise ValueError("grid must be one-dimensional")
    return g


def pair_component_F(cfg, i, j, grid=DEFAULT_GRID, tol: float = 1e-6, method: str = "exact") -> SampledFunction:
    """``F^{i,j}(s) = (2/D) m(Omega^{i,j}(s))`` without the pair weight."""
    g = _as_grid(grid)
    D = float(cusp_areas(cfg).sum())
    total = sum(_branch_areas(cfg, br, g, method, tol) for br in branches(cfg, i, j))
    return SampledFunction(g, 2.0 / D * total, f"F^{{{i},{j}}}")


def limiting_F(
    cfg: FordConfig,
    grid=DEFAULT_GRID,
    tol: float = 1e-6,
    method: str = "exact",
    threads: int = 1,
    seed: int = 0,
    mc_samples: int = 2**18,
) -> SampledFunction:
    """Limiting gap distribution on ``grid``.

    Parameters
    ----------
    method : {"exact", "quadtree", "montecarlo"}
        ``exact`` integrates each convex piece in closed form (error near
        machine precision, well inside ``tol``); ``quadtree`` uses the adaptive
        subdivision with per-region tolerance ``tol / (number of regions)``;
        ``montecarlo`` counts ``mc_samples`` scrambled Sobol points per region
        (reproducible through ``seed``).
    threads : int
        Worker threads over (pair, branch) regions.
    """
    require_valid(cfg)
    g = _as_grid(grid)
    D = float(cusp_areas(cfg).sum())
    jobs = [(p.weight, br) for p in pairs(cfg) for br in branches(cfg, p.i, p.j)]
    sub_tol = tol / max(1, len(jobs))

    def run(job):
        w, br = job
        return w * _branch_areas(cfg, br, g, method, sub_tol, seed, mc_samples)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    vals = 2.0 / D * np.sum(parts, axis=0)
    return SampledFunction(g, vals, "F")


def total_mass(cfg: FordConfig) -> float:
    """``F(inf)``: weighted areas with the cutoff removed, times ``2/D``."""
    return float(limiting_F(cfg, [math.inf]).values[0])


def density(cfg: FordConfig, grid=DEFAULT_GRID, tol: float = 1e-6, **kw) -> SampledFunction:
    """``F'(s)`` by central differences (one-sided at the ends)."""
    F = limiting_F(cfg, grid, tol, **kw)
    if len(F.grid) < 2:
        raise ValueError("density needs at least two grid points")
    return SampledFunction(F.grid, np.gradient(F.values, F.grid), "density")
