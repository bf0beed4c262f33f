"""Enumeration of the tangencies of a packing with the real axis.

A circle tangent to ``R`` at ``alpha`` with radius ``r`` is encoded by the
vector ``u = (p, q)`` with ``q = 1/sqrt(2r)`` and ``p = alpha q``; the top line
``R + i`` is ``u_1 = (1, 0)``.  Real matrices of determinant ``+-1`` act
linearly on these vectors, with ``kappa = 2 q^2`` and ``alpha = p / q``.  Two
circles are tangent iff ``|det(u, v)| = 1``.

The reflection ``S_j`` in the dual circle of the gap between ``C_j`` and
``C_{j+1}`` fixes ``u_j`` and negates ``u_{j+1}``.  A gap frame ``(G, j)``
stores the two vectors ``G u_j`` and ``G u_{j+1}``; its new circles are
``G S_j u_k`` for ``k`` outside ``{j, j+1}`` and its child gaps are
``(G S_j, l)`` for ``l != j``.  Because every circle inside a gap is smaller
than both circles bounding it, a gap whose bounding circles already reach the
curvature bound is pruned.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .config import FordConfig, packing_constant, require_valid
from .errors import BudgetExceeded

DEFAULT_NODE_CAP = 10**8
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class Tangency:
    alpha: float
    kappa: float
    depth: int


@dataclass
class GapFrame:
    """A batch of gaps of one type ``j`` (1-based); rows of ``w1``/``w2`` are the
    horocycle vectors of the two bounding circles."""

    j: int
    w1: np.ndarray
    w2: np.ndarray
    depth: np.ndarray

    def __len__(self):
        return len(self.depth)

    def curvatures(self):
        return 2 * self.w1[:, 1] ** 2, 2 * self.w2[:, 1] ** 2


@dataclass
class Tangencies:
    """Sorted tangencies as parallel arrays; iterates as :class:`Tangency`."""

    alpha: np.ndarray
    kappa: np.ndarray
    depth: np.ndarray
    interval: tuple = None
    T: float = math.inf
    nodes: int = 0
    audit: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.alpha)

    def __iter__(self) -> Iterator[Tangency]:
        for a, k, d in zip(self.alpha, self.kappa, self.depth):
            yield Tangency(float(a), float(k), int(d))

    def __getitem__(self, i):
        return Tangency(float(self.alpha[i]), float(self.kappa[i]), int(self.depth[i]))

    @classmethod
    def from_arrays(cls, alpha, kappa, depth=None, interval=None, T=math.inf):
        alpha = np.asarray(alpha, dtype=float)
        kappa = np.asarray(kappa, dtype=float)
        depth = np.zeros(len(alpha), dtype=np.int64) if depth is None else np.asarray(depth, dtype=np.int64)
        order = np.argsort(alpha, kind="stable")
        return cls(alpha[order], kappa[order], depth[order], interval, T)


def horocycle_vectors(cfg: FordConfig) -> np.ndarray:
    """Rows ``u_1, ..., u_h`` (row ``k-1`` holds ``u_k``)."""
    u = np.empty((cfg.h, 2))
    u[0] = (1.0, 0.0)
    for i in range(2, cfg.h + 1):
        q = 1.0 / math.sqrt(2.0 * cfg.radius(i))
        u[i - 1] = (cfg.alpha(i) * q, q)
    return u


def reflection_matrices(cfg: FordConfig) -> list:
    """Real matrices (det -1) of ``S_1, ..., S_h`` acting on horocycle vectors."""
    u = horocycle_vectors(cfg)
    h = cfg.h
    out = []
    for j in range(h):
        P = np.column_stack([u[j], u[(j + 1) % h]])
        out.append(P @ np.diag([1.0, -1.0]) @ np.linalg.inv(P))
    return out


def _coefficients(cfg: FordConfig):
    """``coef[j, k] = (x, y)`` with ``S_j u_k = x u_j + y u_{j+1}`` (0-based)."""
    u = horocycle_vectors(cfg)
    h = cfg.h
    coef = np.empty((h, h, 2))
    for j in range(h):
        P = np.column_stack([u[j], u[(j + 1) % h]])
        xy = np.linalg.solve(P, u.T).T  # coordinates of every u_k
        coef[j, :, 0] = xy[:, 0]
        coef[j, :, 1] = -xy[:, 1]
    return coef


def _seeds(cfg: FordConfig, a: float, b: float):
    h, t = cfg.h, cfg.period_t
    u = horocycle_vectors(cfg)
    Sh = np.array([[-1.0, t], [0.0, 1.0]])
    alphas, kappas, depths = [], [], []
    frames = {j: ([], [], []) for j in range(h)}
    n0, n1 = math.floor(a / t) - 1, math.floor(b / t) + 1
    for n in range(n0, n1 + 1):
        tr = np.array([[1.0, n * t], [0.0, 1.0]])
        for G, depth, ks in ((tr, 0, range(1, h)), (tr @ Sh, 1, range(2, h - 1))):
            v = (G @ u.T).T
            for k in ks:
                alphas.append(v[k, 0] / v[k, 1])
                kappas.append(2 * v[k, 1] ** 2)
                depths.append(depth)
            for j in range(1, h - 1):  # finite gaps between C_2 .. C_h
                frames[j][0].append(v[j])
                frames[j][1].append(v[j + 1])
                frames[j][2].append(depth)
    seeded = {
        j: GapFrame(j + 1, np.array(w1).reshape(-1, 2), np.array(w2).reshape(-1, 2), np.array(d, dtype=np.int64))
        for j, (w1, w2, d) in frames.items()
        if w1
    }
    return np.array(alphas), np.array(kappas), np.array(depths, dtype=np.int64), seeded


def _enumerate_one(cfg, T, a, b, node_cap, audit_samples):
    h = cfg.h
    coef = _coefficients(cfg)
    s_alpha, s_kappa, s_depth, frontier = _seeds(cfg, a, b)
    keep = (s_kappa <= T) & (s_alpha >= a) & (s_alpha < b)
    out_a, out_k, out_d = [s_alpha[keep]], [s_kappa[keep]], [s_depth[keep]]
    nodes = 0
    audit = {"checked": 0, "violations": 0}

    def alive(w1, w2):
        k1, k2 = 2 * w1[:, 1] ** 2, 2 * w2[:, 1] ** 2
        a1, a2 = w1[:, 0] / w1[:, 1], w2[:, 0] / w2[:, 1]
        lo, hi = np.minimum(a1, a2), np.maximum(a1, a2)
        return (np.maximum(k1, k2) < T) & (hi > a) & (lo < b)

    # drop seed gaps that are already pruned
    frontier = {
        j: GapFrame(f.j, f.w1[m], f.w2[m], f.depth[m])
        for j, f in frontier.items()
        for m in [alive(f.w1, f.w2)]
        if m.any()
    }
    while frontier:
        nxt = {j: ([], [], []) for j in range(h)}
        for j, f in frontier.items():
            nodes += len(f)
            if nodes > node_cap:
                raise BudgetExceeded(f"node cap {node_cap} exceeded")
            c = coef[j]
            w1, w2 = f.w1, f.w2
            child_depth = f.depth + 1
            jn = (j + 1) % h
            new = {}
            for k in range(h):
                if k == j or k == jn:
                    continue
                v = c[k, 0] * w1 + c[k, 1] * w2
                new[k] = v
                q = v[:, 1]
                kap = 2 * q * q
                al = v[:, 0] / q
                m = (kap <= T) & (al >= a) & (al < b)
                out_a.append(al[m])
                out_k.append(kap[m])
                out_d.append(child_depth[m])
                if audit["checked"] < audit_samples:
                    k1, k2 = f.curvatures()
                    take = min(len(kap), audit_samples - audit["checked"])
                    bad = ~((kap[:take] > k1[:take]) & (kap[:take] > k2[:take]))
                    audit["checked"] += take
                    audit["violations"] += int(bad.sum())
            new[j] = w1
            new[jn] = -w2
            for l in range(h):
                if l == j:
                    continue
                v1, v2 = new[l], new[(l + 1) % h]
                m = alive(v1, v2)
                if m.any():
                    nxt[l][0].append(v1[m])
                    nxt[l][1].append(v2[m])
                    nxt[l][2].append(child_depth[m])
        frontier = {
            l: GapFrame(l + 1, np.concatenate(w1), np.concatenate(w2), np.concatenate(d))
            for l, (w1, w2, d) in nxt.items()
            if w1
        }
    return np.concatenate(out_a), np.concatenate(out_k), np.concatenate(out_d), nodes, audit


def enumerate_tangencies(
    cfg: FordConfig,
    T: float,
    interval,
    node_cap: int = DEFAULT_NODE_CAP,
    threads: int = 1,
    audit_samples: int = 0,
) -> Tangencies:
    """All tangencies with curvature at most ``T`` and ``alpha`` in ``[a, b)``.

    Parameters
    ----------
    cfg : FordConfig
    T : float
        Curvature bound.
    interval : (a, b)
        Half-open interval on the real axis.
    node_cap : int
        Maximum number of gaps visited; :class:`BudgetExceeded` beyond it.
    threads : int
        Split the interval into this many pieces processed concurrently.
    audit_samples : int
        Number of parent/child curvature comparisons to check; the counts
        are returned in ``result.audit``.
    """
    require_valid(cfg)
    a, b = map(float, interval)
    if not T > 0:
        raise ValueError("T must be positive")
    if not (math.isfinite(a) and math.isfinite(b)) or b < a:
        raise ValueError(f"bad interval [{a}, {b})")
    threads = max(1, int(threads))
    if threads == 1 or b - a <= 0:
        parts = [_enumerate_one(cfg, T, a, b, node_cap, audit_samples)]
    else:
        cuts = np.linspace(a, b, threads + 1)
        cuts[-1] = b
        with ThreadPoolExecutor(threads) as ex:
            futs = [
                ex.submit(_enumerate_one, cfg, T, lo, hi, node_cap, audit_samples // threads)
                for lo, hi in zip(cuts[:-1], cuts[1:])
            ]
            parts = [f.result() for f in futs]
    al = np.concatenate([p[0] for p in parts])
    ka = np.concatenate([p[1] for p in parts])
    de = np.concatenate([p[2] for p in parts])
    order = np.lexsort((ka, al))
    al, ka, de = al[order], ka[order], de[order]
    if len(al) > 1:
        dup = np.concatenate([[False], np.diff(al) <= MERGE_TOL])
        al, ka, de = al[~dup], ka[~dup], de[~dup]
    audit = {
        "checked": sum(p[4]["checked"] for p in parts),
        "violations": sum(p[4]["violations"] for p in parts),
    }
    return Tangencies(al, ka, de, (a, b), float(T), sum(p[3] for p in parts), audit)


def count_asymptotic_check(cfg: FordConfig, T: float, interval, **kw):
    """Count of tangencies and its ratio to the leading term ``l(I) c T``."""
    tg = enumerate_tangencies(cfg, T, interval, **kw)
    a, b = interval
    n = len(tg)
    expected = (b - a) * packing_constant(cfg) * T
    return n, (n / expected if n else 0.0)
