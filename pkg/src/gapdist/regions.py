"""Plane regions cut out by products of linear forms, and their areas.

A :class:`BilinearConstraint` reads ``f1(c, d) * f2(c, d)  rel  rhs`` where
``f1``, ``f2`` are affine forms; linear constraints use ``f2 = ONE``.  A
:class:`Region` is the intersection of its constraints inside a bounding box.

Three area routines are provided:

* :func:`exact_area` splits the region into convex polygons, each carrying at
  most one hyperbolic constraint ``u v >= X`` with ``u, v >= 0`` affine, and
  integrates with Green's theorem (closed form up to rounding);
* :func:`quadtree_area` adaptively subdivides the bounding box with interval
  classification of cells;
* :func:`monte_carlo_area` counts scrambled Sobol points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .errors import BudgetExceeded

RELATIONS = ("<=", ">=", "<", ">")


@dataclass(frozen=True)
class LinearForm:
    """``u c + v d + w``."""

    u: float
    v: float
    w: float = 0.0

    def __call__(self, c, d):
        return self.u * np.asarray(c) + self.v * np.asarray(d) + self.w

    def scaled(self, k: float) -> "LinearForm":
        return LinearForm(k * self.u, k * self.v, k * self.w)

    def shifted(self, k: float) -> "LinearForm":
        return LinearForm(self.u, self.v, self.w + k)

    @property
    def is_constant(self) -> bool:
        return self.u == 0 and self.v == 0

    def to_list(self):
        return [self.u, self.v, self.w]


ONE = LinearForm(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class BilinearConstraint:
    f1: LinearForm
    f2: LinearForm
    relation: str
    rhs: float
    label: str = ""

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}")

    @classmethod
    def linear(cls, f: LinearForm, relation: str, rhs: float, label: str = ""):
        return cls(f, ONE, relation, rhs, label)

    @property
    def is_linear(self) -> bool:
        return self.f2.is_constant or self.f1.is_constant

    @property
    def is_upper(self) -> bool:
        return self.relation in ("<=", "<")

    def value(self, c, d):
        return self.f1(c, d) * self.f2(c, d)

    def margin(self, c, d):
        """Nonnegative exactly where the constraint holds (up to the boundary)."""
        v = self.value(c, d) - self.rhs
        return -v if self.is_upper else v

    def holds(self, c, d):
        v = self.value(c, d)
        op = {"<=": np.less_equal, ">=": np.greater_equal, "<": np.less, ">": np.greater}[self.relation]
        return op(v, self.rhs)

    def scaled_by(self, lam: float) -> "BilinearConstraint":
        """Constraint for the dilated region ``lam * R``."""
        f1 = LinearForm(self.f1.u, self.f1.v, self.f1.w * lam)
        f2 = LinearForm(self.f2.u, self.f2.v, self.f2.w * lam)
        return BilinearConstraint(f1, f2, self.relation, self.rhs * lam * lam, self.label)

    def to_dict(self):
        return {
            "f1": self.f1.to_list(),
            "f2": self.f2.to_list(),
            "relation": self.relation,
            "rhs": self.rhs,
            "label": self.label,
        }

    def __str__(self):
        def fmt(f):
            return f"({f.u:.6g}c{f.v:+.6g}d{f.w:+.6g})"

        lhs = fmt(self.f1) if self.f2 == ONE else f"{fmt(self.f1)}*{fmt(self.f2)}"
        return f"{lhs} {self.relation} {self.rhs:.9g}"


@dataclass(frozen=True)
class Region:
    constraints: tuple
    bounding_box: tuple  # (c0, c1, d0, d1)
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "bounding_box", tuple(float(x) for x in self.bounding_box))

    def contains(self, c, d):
        c, d = np.asarray(c, dtype=float), np.asarray(d, dtype=float)
        c0, c1, d0, d1 = self.bounding_box
        ok = (c >= c0) & (c <= c1) & (d >= d0) & (d <= d1)
        for k in self.constraints:
            ok &= k.holds(c, d)
        return ok

    def with_constraints(self, extra, label=None) -> "Region":
        return Region(self.constraints + tuple(extra), self.bounding_box, self.label if label is None else label)

    def box_area(self) -> float:
        c0, c1, d0, d1 = self.bounding_box
        return max(c1 - c0, 0.0) * max(d1 - d0, 0.0)

    def to_dict(self):
        return {
            "label": self.label,
            "bounding_box": list(self.bounding_box),
            "constraints": [k.to_dict() for k in self.constraints],
        }


# ---------------------------------------------------------------------------
# exact route: convex polygons with at most one hyperbolic side
# ---------------------------------------------------------------------------

_AREA_EPS = 1e-20


def polygon_area(P: np.ndarray) -> float:
    if len(P) < 3:
        return 0.0
    x, y = P[:, 0], P[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def clip_halfplane(P: np.ndarray, a: float, b: float, w: float) -> np.ndarray:
    """Part of convex polygon ``P`` where ``a x + b y + w >= 0``."""
    if len(P) == 0:
        return P
    g = a * P[:, 0] + b * P[:, 1] + w
    if np.all(g >= 0):
        return P
    if np.all(g <= 0):
        return P[:0]
    out = []
    n = len(P)
    for k in range(n):
        p, q = P[k], P[(k + 1) % n]
        gp, gq = g[k], g[(k + 1) % n]
        if gp >= 0:
            out.append(p)
        if (gp >= 0) != (gq >= 0):
            t = gp / (gp - gq)
            out.append(p + t * (q - p))
    return np.array(out).reshape(-1, 2)


def box_polygon(box) -> np.ndarray:
    c0, c1, d0, d1 = box
    return np.array([[c0, d0], [c1, d0], [c1, d1], [c0, d1]], dtype=float)


@dataclass(frozen=True)
class _Hyper:
    """``U V >= X`` (or ``<=`` when ``upper``) on a piece where ``U, V >= 0``."""

    U: LinearForm
    V: LinearForm
    X: float
    upper: bool


def _halfplane(f: LinearForm, sign: float, rhs: float = 0.0):
    # sign * (f - rhs) >= 0
    return (sign * f.u, sign * f.v, sign * (f.w - rhs))


def _proportional(f1: LinearForm, f2: LinearForm):
    """``k`` with ``f2 = k f1`` or ``None``."""
    a = np.array(f1.to_list())
    b = np.array(f2.to_list())
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return None
    cross = np.linalg.norm(np.cross(a, b))
    if cross > 1e-13 * na * nb:
        return None
    k = float(np.dot(a, b) / np.dot(a, a))
    return k


def _alternatives(k: BilinearConstraint):
    """Disjunction of ``(halfplanes, hyper)`` pieces equivalent to ``k``."""
    f1, f2, rhs, upper = k.f1, k.f2, float(k.rhs), k.is_upper
    if f1.is_constant:
        f1, f2 = f2, f1
    if f2.is_constant:
        f = f1.scaled(f2.w)
        return [([_halfplane(f, -1.0 if upper else 1.0, rhs)], None)]
    kk = _proportional(f1, f2)
    if kk is not None:
        # kk f1^2 rel rhs
        rho = rhs / kk
        up = upper if kk > 0 else not upper
        if up:
            if rho < 0:
                return []
            s = math.sqrt(rho)
            return [([_halfplane(f1, -1.0, s), _halfplane(f1, 1.0, -s)], None)]
        if rho <= 0:
            return [([], None)]
        s = math.sqrt(rho)
        return [([_halfplane(f1, 1.0, s)], None), ([_halfplane(f1, -1.0, -s)], None)]
    out = []
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            hp = [_halfplane(f1, s1), _halfplane(f2, s2)]
            # on this quadrant f1 f2 = s1 s2 P with P = (s1 f1)(s2 f2) >= 0
            if s1 * s2 > 0:
                X, up = rhs, upper
            else:
                X, up = -rhs, not upper
            if up:
                if X < 0:
                    continue
                if X == 0:
                    # P <= 0 forces the boundary only
                    continue
                out.append((hp, _Hyper(f1.scaled(s1), f2.scaled(s2), X, True)))
            else:
                if X <= 0:
                    out.append((hp, None))
                else:
                    out.append((hp, _Hyper(f1.scaled(s1), f2.scaled(s2), X, False)))
    return out


@dataclass
class Piece:
    polygon: np.ndarray
    hypers: list = field(default_factory=list)


def decompose(constraints, box) -> list:
    """Split a region into convex polygons with attached hyperbolic constraints."""
    start = box_polygon(box)
    pieces = [Piece(start, [])]
    for k in constraints:
        alts = _alternatives(k)
        nxt = []
        for pc in pieces:
            for hps, hyp in alts:
                P = pc.polygon
                for a, b, w in hps:
                    P = clip_halfplane(P, a, b, w)
                    if len(P) < 3:
                        break
                if len(P) < 3 or polygon_area(P) <= _AREA_EPS:
                    continue
                nxt.append(Piece(P, pc.hypers + ([hyp] if hyp is not None else [])))
        pieces = nxt
        if not pieces:
            break
    return pieces


def _roots01(qa, qb, qc):
    """Real roots of ``qa t^2 + qb t + qc`` strictly inside (0, 1)."""
    scale = max(abs(qa), abs(qb), abs(qc), 1e-300)
    if abs(qa) <= 1e-14 * scale:
        if abs(qb) <= 1e-300:
            return []
        r = [-qc / qb]
    else:
        disc = qb * qb - 4 * qa * qc
        if disc < 0:
            return []
        sq = math.sqrt(disc)
        q = -0.5 * (qb + math.copysign(sq, qb))
        r = [q / qa]
        if q != 0:
            r.append(qc / q)
    return sorted(x for x in r if 1e-15 < x < 1 - 1e-15)


def hyperbolic_cap_area(P: np.ndarray, U: LinearForm, V: LinearForm, X: float) -> float:
    """Area of ``{(c, d) in P : U V >= X}`` for a convex ``P`` on which ``U, V >= 0``."""
    J = np.array([[U.u, U.v], [V.u, V.v]])
    det = abs(float(np.linalg.det(J)))
    if det <= 1e-300:
        raise ValueError("degenerate hyperbolic constraint")
    uv = np.column_stack([U(P[:, 0], P[:, 1]), V(P[:, 0], P[:, 1])])
    uv = np.maximum(uv, 0.0)
    n = len(uv)
    segs = []  # (start, end, inside)
    for k in range(n):
        A, B = uv[k], uv[(k + 1) % n]
        dd = B - A
        roots = _roots01(dd[0] * dd[1], A[0] * dd[1] + A[1] * dd[0], A[0] * A[1] - X)
        ts = [0.0, *roots, 1.0]
        for t0, t1 in zip(ts[:-1], ts[1:]):
            if t1 - t0 <= 0:
                continue
            m = A + 0.5 * (t0 + t1) * dd
            segs.append((A + t0 * dd, A + t1 * dd, m[0] * m[1] >= X))
    inside = [s[2] for s in segs]
    if all(inside):
        return polygon_area(P)
    if not any(inside):
        return 0.0
    # rotate so the walk begins at an entry point
    k0 = next(k for k in range(len(segs)) if segs[k][2] and not segs[k - 1][2])
    segs = segs[k0:] + segs[:k0]
    total = 0.0
    exit_pt = None
    for p, q, ins in segs:
        if ins:
            if exit_pt is not None:
                total += -X * math.log(p[0] / exit_pt[0])
                exit_pt = None
            total += 0.5 * (p[0] * q[1] - q[0] * p[1])
        elif exit_pt is None:
            exit_pt = p
    if exit_pt is not None:
        p = segs[0][0]
        total += -X * math.log(p[0] / exit_pt[0])
    return abs(total) / det


def piece_area(pc: Piece, tol: float = 1e-9) -> float:
    P = pc.polygon
    if not pc.hypers:
        return polygon_area(P)
    if len(pc.hypers) == 1:
        hy = pc.hypers[0]
        cap = hyperbolic_cap_area(P, hy.U, hy.V, hy.X)
        return polygon_area(P) - cap if hy.upper else cap
    # several curved sides: fall back to adaptive quadrature on this piece
    cons = []
    for k in range(len(P)):
        p, q = P[k], P[(k + 1) % len(P)]
        # inward normal for a counterclockwise polygon
        nx, ny = -(q[1] - p[1]), q[0] - p[0]
        f = LinearForm(nx, ny, -(nx * p[0] + ny * p[1]))
        cons.append(BilinearConstraint.linear(f, ">=", 0.0))
    if _signed_area(P) < 0:
        cons = [BilinearConstraint.linear(k.f1.scaled(-1.0), ">=", 0.0) for k in cons]
    for hy in pc.hypers:
        cons.append(BilinearConstraint(hy.U, hy.V, "<=" if hy.upper else ">=", hy.X))
    box = (P[:, 0].min(), P[:, 0].max(), P[:, 1].min(), P[:, 1].max())
    return quadtree_area(Region(cons, box), tol=tol).area


def _signed_area(P):
    x, y = P[:, 0], P[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def exact_area(region: Region) -> float:
    """Area of ``region`` by convex decomposition and Green's theorem."""
    return float(sum(piece_area(pc) for pc in decompose(region.constraints, region.bounding_box)))


def pieces_area(pieces, extra=()) -> float:
    """Area of pre-decomposed pieces intersected with extra constraints."""
    total = 0.0
    for pc in pieces:
        sub = [pc]
        for k in extra:
            alts = _alternatives(k)
            nxt = []
            for s in sub:
                for hps, hyp in alts:
                    P = s.polygon
                    for a, b, w in hps:
                        P = clip_halfplane(P, a, b, w)
                        if len(P) < 3:
                            break
                    if len(P) < 3 or polygon_area(P) <= _AREA_EPS:
                        continue
                    nxt.append(Piece(P, s.hypers + ([hyp] if hyp is not None else [])))
            sub = nxt
        total += sum(piece_area(s) for s in sub)
    return total


def max_abs_product(pieces, f1: LinearForm, f2: LinearForm) -> float:
    """Maximum of ``|f1 f2|`` over polygon pieces (vertices and edge extrema)."""
    best = 0.0
    for pc in pieces:
        P = pc.polygon
        n = len(P)
        for k in range(n):
            p, q = P[k], P[(k + 1) % n]
            a1, b1 = f1(*p), f1(*q) - f1(*p)
            a2, b2 = f2(*p), f2(*q) - f2(*p)
            cands = [0.0, 1.0]
            # (a1 + b1 t)(a2 + b2 t) has its vertex at t* = -(a1 b2 + a2 b1)/(2 b1 b2)
            if b1 * b2 != 0:
                ts = -(a1 * b2 + a2 * b1) / (2 * b1 * b2)
                if 0 < ts < 1:
                    cands.append(ts)
            for t in cands:
                best = max(best, abs((a1 + b1 * t) * (a2 + b2 * t)))
    return best


# ---------------------------------------------------------------------------
# quadtree route
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AreaEstimate:
    area: float
    error: float
    cells: int


def _form_range(f: LinearForm, x0, x1, y0, y1):
    ax = f.u * x0, f.u * x1
    ay = f.v * y0, f.v * y1
    lo = np.minimum(*ax) + np.minimum(*ay) + f.w
    hi = np.maximum(*ax) + np.maximum(*ay) + f.w
    return lo, hi


def _classify(k: BilinearConstraint, x0, x1, y0, y1):
    """+1 satisfied on the whole cell, 0 violated on the whole cell, -1 unknown."""
    l1, h1 = _form_range(k.f1, x0, x1, y0, y1)
    l2, h2 = _form_range(k.f2, x0, x1, y0, y1)
    prods = np.stack([l1 * l2, l1 * h2, h1 * l2, h1 * h2])
    lo, hi = prods.min(axis=0), prods.max(axis=0)
    if k.is_upper:
        sat, vio = hi <= k.rhs, lo > k.rhs
    else:
        sat, vio = lo >= k.rhs, hi < k.rhs
    return np.where(sat, 1, np.where(vio, 0, -1))


def _sum_uniform_cdf(z, a, b):
    """CDF at ``z`` of ``X + Y`` with ``X ~ U(0, a)``, ``Y ~ U(0, b)``."""
    a, b = np.maximum(a, b), np.minimum(a, b)
    out = np.zeros_like(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        tri_lo = z * z / (2 * a * b)
        mid = (z - b / 2) / a
        tri_hi = 1 - (a + b - z) ** 2 / (2 * a * b)
    out = np.where(z <= 0, 0.0, out)
    out = np.where((z > 0) & (z <= b), tri_lo, out)
    out = np.where((z > b) & (z <= a), mid, out)
    out = np.where((z > a) & (z < a + b), tri_hi, out)
    out = np.where(z >= a + b, 1.0, out)
    return np.clip(np.nan_to_num(out, nan=0.5), 0.0, 1.0)


def _linear_fraction(k: BilinearConstraint, xc, yc, hx, hy):
    """Fraction of each cell on which the linearized margin is nonnegative,
    and an error bound for the area obtained from it."""
    f1, f2 = k.f1, k.f2
    v1, v2 = f1(xc, yc), f2(xc, yc)
    g0 = v1 * v2 - k.rhs
    gx = f1.u * v2 + f2.u * v1
    gy = f1.v * v2 + f2.v * v1
    if k.is_upper:
        g0, gx, gy = -g0, -gx, -gy
    a = np.abs(gx) * hx
    b = np.abs(gy) * hy
    frac = 1.0 - _sum_uniform_cdf(-g0 + (a + b) / 2, a, b)
    # second derivative of f1 f2 is constant: H = grad f1 grad f2^T + sym
    Hxx, Hyy, Hxy = 2 * f1.u * f2.u, 2 * f1.v * f2.v, f1.u * f2.v + f1.v * f2.u
    hnorm = math.sqrt(Hxx * Hxx + Hyy * Hyy + 2 * Hxy * Hxy)
    grad = np.hypot(gx, gy)
    diag2 = hx * hx + hy * hy
    with np.errstate(divide="ignore"):
        err = np.where(grad > 0, hnorm * diag2 / 8 / grad * math.sqrt(diag2), np.inf)
    return frac, np.minimum(err, hx * hy)


def quadtree_area(
    region: Region,
    tol: float = 1e-6,
    max_depth: int = 24,
    max_cells: int = 5_000_000,
) -> AreaEstimate:
    """Adaptive quadtree area with conservative cell classification.

    Cells are classified per constraint by interval arithmetic on the affine
    factors.  A cell crossed by a single constraint is integrated with the
    linearization of that constraint at the cell center when the curvature
    error bound fits the per-cell budget; otherwise it is split.  The budget is
    proportional to the cell side so that the total stays below ``tol``.
    """
    c0, c1, d0, d1 = region.bounding_box
    W, H = c1 - c0, d1 - d0
    if W <= 0 or H <= 0:
        return AreaEstimate(0.0, 0.0, 0)
    cons = region.constraints
    # the boundary of a union of at most a few convex pieces is short
    perimeter = 8.0 * (W + H) * max(1, len(cons))
    x0 = np.array([c0])
    y0 = np.array([d0])
    hx, hy = W, H
    area = 0.0
    err = 0.0
    cells = 0
    for depth in range(max_depth + 1):
        n = len(x0)
        if n == 0:
            break
        cells += n
        if cells > max_cells:
            raise BudgetExceeded(f"quadtree exceeded {max_cells} cells at depth {depth}")
        x1, y1 = x0 + hx, y0 + hy
        status = np.ones(n, dtype=np.int8)
        n_unknown = np.zeros(n, dtype=np.int64)
        which = np.full(n, -1, dtype=np.int64)
        for idx, k in enumerate(cons):
            s = _classify(k, x0, x1, y0, y1)
            status = np.where(s == 0, 0, status)
            unk = s == -1
            n_unknown += unk
            which = np.where(unk, idx, which)
        alive = status != 0
        full = alive & (n_unknown == 0)
        area += full.sum() * hx * hy
        single = alive & (n_unknown == 1)
        multi = alive & (n_unknown > 1)
        budget = tol * max(hx, hy) / perimeter
        refine = multi.copy()
        if single.any():
            idx_single = np.nonzero(single)[0]
            xc = x0[idx_single] + hx / 2
            yc = y0[idx_single] + hy / 2
            frac = np.empty(len(idx_single))
            e = np.empty(len(idx_single))
            for ci in np.unique(which[idx_single]):
                m = which[idx_single] == ci
                frac[m], e[m] = _linear_fraction(cons[ci], xc[m], yc[m], hx, hy)
            ok = e <= budget
            if depth == max_depth:
                ok[:] = True
            area += float(np.sum(frac[ok])) * hx * hy
            err += float(np.sum(e[ok]))
            refine[idx_single[~ok]] = True
        if depth == max_depth:
            k = refine.sum()
            if k:
                # unresolved corners: count half of each cell and charge the rest as error
                area += 0.5 * k * hx * hy
                err += 0.5 * k * hx * hy
            break
        sel = np.nonzero(refine)[0]
        if len(sel) == 0:
            break
        hx, hy = hx / 2, hy / 2
        bx, by = x0[sel], y0[sel]
        x0 = np.concatenate([bx, bx + hx, bx, bx + hx])
        y0 = np.concatenate([by, by, by + hy, by + hy])
    return AreaEstimate(float(area), float(err), int(cells))


def region_area(region: Region, tol: float = 1e-6, **kw) -> float:
    """Area of ``region`` within ``tol`` (absolute) by adaptive quadtree."""
    return quadtree_area(region, tol=tol, **kw).area


def monte_carlo_area(region: Region, n: int = 2**20, seed: int = 0):
    """Quasi-Monte-Carlo area estimate and a binomial standard error."""
    c0, c1, d0, d1 = region.bounding_box
    box = region.box_area()
    if box == 0:
        return 0.0, 0.0
    m = int(math.ceil(math.log2(max(n, 2))))
    sampler = qmc.Sobol(d=2, scramble=True, seed=seed)
    hits = 0
    total = 0
    chunk = 2**18
    remaining = 2**m
    while remaining > 0:
        k = min(chunk, remaining)
        pts = sampler.random(k)
        c = c0 + (c1 - c0) * pts[:, 0]
        d = d0 + (d1 - d0) * pts[:, 1]
        hits += int(np.count_nonzero(region.contains(c, d)))
        total += k
        remaining -= k
    p = hits / total
    return box * p, box * math.sqrt(max(p * (1 - p), 1.0 / total) / total)
