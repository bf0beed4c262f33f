"""Empirical gap statistics of tangency sequences."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import FordConfig
from .enumeration import Tangencies, enumerate_tangencies
from .errors import ArcThroughInfinity, GridMismatch, MarginExhausted, TooFewPoints
from .geom import MobiusMap, circles_from_tangencies, mobius_apply_circles

DEFAULT_GRID = np.linspace(0.0, 6.0, 600)


@dataclass
class EmpiricalCDF:
    grid: np.ndarray
    values: np.ndarray
    n: int
    name: str = "F_empirical"

    def __call__(self, s):
        return np.interp(s, self.grid, self.values)


def _alphas_and_interval(tangencies, interval):
    if isinstance(tangencies, Tangencies):
        alpha = tangencies.alpha
        if interval is None:
            interval = tangencies.interval
    else:
        items = list(tangencies)
        if items and hasattr(items[0], "alpha"):
            alpha = np.array([t.alpha for t in items], dtype=float)
        else:
            alpha = np.asarray(items, dtype=float)
    if interval is None:
        raise ValueError("an interval is required to define the mean spacing")
    a, b = map(float, interval)
    alpha = np.sort(np.asarray(alpha, dtype=float))
    alpha = alpha[(alpha >= a) & (alpha < b)]
    return alpha, b - a


def normalized_gaps(tangencies, interval=None) -> np.ndarray:
    """Consecutive gaps divided by the mean spacing ``l / n``.

    The boundary gaps at the ends of the interval are not included, so ``n``
    points give ``n - 1`` gaps.
    """
    alpha, length = _alphas_and_interval(tangencies, interval)
    n = len(alpha)
    if n < 2:
        raise TooFewPoints(f"need at least two tangencies, got {n}")
    return np.diff(alpha) * n / length


def gap_cdf(tangencies, interval=None, grid=None) -> EmpiricalCDF:
    """Empirical distribution function of normalized consecutive gaps."""
    g = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    gaps = np.sort(normalized_gaps(tangencies, interval))
    vals = np.searchsorted(gaps, g, side="right") / len(gaps)
    return EmpiricalCDF(g, vals, len(gaps) + 1)


def min_normalized_gap(tangencies, interval=None) -> float:
    return float(normalized_gaps(tangencies, interval).min())


def ks_distance(F1, F2) -> float:
    """Sup-norm distance of two sampled distribution functions.

    Identical grids are compared pointwise.  Otherwise both functions are
    linearly interpolated on the union of grid points inside the common range;
    :class:`GridMismatch` is raised when the ranges do not overlap.
    """
    g1, v1 = np.asarray(F1.grid, dtype=float), np.asarray(F1.values, dtype=float)
    g2, v2 = np.asarray(F2.grid, dtype=float), np.asarray(F2.values, dtype=float)
    if g1.shape == g2.shape and np.allclose(g1, g2, rtol=0, atol=1e-12):
        return float(np.max(np.abs(v1 - v2))) if len(g1) else 0.0
    lo, hi = max(g1.min(), g2.min()), min(g1.max(), g2.max())
    if not lo <= hi:
        raise GridMismatch(f"grids [{g1.min()}, {g1.max()}] and [{g2.min()}, {g2.max()}] do not overlap")
    g = np.union1d(g1, g2)
    g = g[(g >= lo) & (g <= hi)]
    return float(np.max(np.abs(np.interp(g, g1, v1) - np.interp(g, g2, v2))))


# conformal pushforward ------------------------------------------------------


def _quadratic(M: MobiusMap):
    # |c x + d|^2 = P x^2 + Q x + R for real x
    c, d = M.c, M.d
    return abs(c) ** 2, 2 * (c * d.conjugate()).real, abs(d) ** 2


def _arc_antiderivative(M: MobiusMap, x):
    """An antiderivative of ``|M'(x)| = 1 / (P x^2 + Q x + R)``."""
    P, Q, R = _quadratic(M)
    x = np.asarray(x, dtype=float)
    if P == 0:
        return x / R
    disc = 4 * P * R - Q * Q
    if disc > 1e-24 * max(P * R, Q * Q):
        sq = math.sqrt(disc)
        return 2.0 / sq * np.arctan((2 * P * x + Q) / sq)
    return -1.0 / (P * x + Q / 2)


def arc_length(M: MobiusMap, x0: float, x1):
    """Length of the image of ``[x0, x1]`` under ``M`` (vectorized in ``x1``)."""
    return _arc_antiderivative(M, x1) - _arc_antiderivative(M, x0)


def _check_arc(M: MobiusMap, x0, x1):
    P, Q, R = _quadratic(M)
    if P == 0:
        return
    xv = -Q / (2 * P)
    if x0 <= xv <= x1 and P * xv * xv + Q * xv + R <= 1e-14 * max(1.0, R):
        raise ArcThroughInfinity(f"M sends the real point {xv:.12g} to infinity")


def sup_derivative(M: MobiusMap, x0: float, x1: float) -> float:
    P, Q, R = _quadratic(M)
    cands = [x0, x1]
    if P > 0:
        xv = -Q / (2 * P)
        if x0 < xv < x1:
            cands.append(xv)
    return max(1.0 / (P * x * x + Q * x + R) for x in cands)


def conformal_pushforward(
    cfg: FordConfig,
    M: MobiusMap,
    T: float,
    image_arc,
    margin: float = 0.05,
    max_attempts: int = 6,
) -> Tangencies:
    """Tangencies of ``M(P)`` with the base ``M(R)`` along an arc.

    Parameters
    ----------
    image_arc : (x0, x1)
        The arc is ``M([x0, x1))``, given by its preimage on the real axis.
    margin : float
        Relative safety margin on the model curvature bound; doubled on each
        retry while the observed curvature correction does not fit.

    Returns
    -------
    Tangencies
        Positions are arc length along ``M(R)`` anchored so that ``M(x0)``
        sits at ``x0`` (for the identity map this reproduces the real
        coordinate); ``kappa`` is the exact curvature of the image circle.
    """
    x0, x1 = map(float, image_arc)
    if not x1 > x0:
        raise ValueError("empty arc")
    _check_arc(M, x0, x1)
    sup = sup_derivative(M, x0, x1)
    for _ in range(max_attempts):
        T_model = T * sup * (1 + margin)
        tg = enumerate_tangencies(cfg, T_model, (x0, x1))
        A, B, C = circles_from_tangencies(tg.alpha, 1.0 / tg.kappa)
        A2, _, _ = mobius_apply_circles(M, A, B, C)
        kap = np.abs(A2)
        dM = M.derivative_abs(tg.alpha)
        corr = float(np.max(np.abs(kap - tg.kappa / dM))) if len(kap) else 0.0
        if sup * (T + 2 * corr) <= T_model:
            keep = kap <= T
            s = x0 + arc_length(M, x0, tg.alpha[keep])
            L = float(arc_length(M, x0, x1))
            out = Tangencies.from_arrays(s, kap[keep], tg.depth[keep], (x0, x0 + L), T)
            out.audit = {"max_correction": corr, "model_T": T_model}
            return out
        margin = max(2 * margin, 1.5 * (sup * (T + 2 * corr) / (T * sup) - 1))
    raise MarginExhausted(f"curvature correction {corr:.3g} exceeds margin after {max_attempts} attempts")
