"""Ford configurations: built-in examples, validation, JSON I/O and constants.

A configuration consists of the base ``R``, the top line ``R + i`` (index 1)
and circles ``C_2, ..., C_h`` tangent to ``R`` at ``alpha_2 < ... < alpha_h``
with radii ``r_i``.  The group translation is by the period ``t``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import InvalidConfig, InvalidPair
from .geom import (
    AntiMobiusMap,
    GeneralizedCircle,
    are_tangent,
    dual_circle,
    inversion_in,
)

SQRT2 = math.sqrt(2.0)
SQRT5 = math.sqrt(5.0)
PHI = (1.0 + SQRT5) / 2.0


@dataclass(frozen=True)
class FordConfig:
    name: str
    period_t: float
    circles: tuple  # ((alpha_i, r_i) for i = 2..h)

    def __post_init__(self):
        object.__setattr__(
            self, "circles", tuple((float(a), float(r)) for a, r in self.circles)
        )
        object.__setattr__(self, "period_t", float(self.period_t))

    @property
    def h(self) -> int:
        return len(self.circles) + 1

    @property
    def indices(self) -> range:
        return range(1, self.h + 1)

    def alpha(self, i: int) -> float:
        """Tangency of ``C_i``; ``inf`` for the top line."""
        self._check_index(i)
        return math.inf if i == 1 else self.circles[i - 2][0]

    def radius(self, i: int) -> float:
        """Radius of ``C_i``; the top line is given the formal radius 1/2."""
        self._check_index(i)
        return 0.5 if i == 1 else self.circles[i - 2][1]

    def circle(self, i: int) -> GeneralizedCircle:
        """``C_i`` as a generalized circle; index 0 is the base ``R``."""
        if i == 0:
            return GeneralizedCircle.real_axis()
        self._check_index(i)
        if i == 1:
            return GeneralizedCircle.horizontal_line(1.0)
        a, r = self.circles[i - 2]
        return GeneralizedCircle.tangent_to_axis(a, r)

    def are_adjacent(self, i: int, j: int) -> bool:
        """Whether ``C_i`` and ``C_j`` are tangent (cyclic neighbours)."""
        d = abs(i - j)
        return d == 1 or d == self.h - 1

    def _check_index(self, i):
        if not 1 <= i <= self.h:
            raise IndexError(f"circle index {i} outside 1..{self.h}")

    # JSON -----------------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "period_t": self.period_t,
            "circles": [{"alpha": a, "radius": r} for a, r in self.circles],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FordConfig":
        try:
            # each circle is {"alpha": a, "radius": r} or a pair [a, r]
            circles = [
                (float(c["alpha"]), float(c["radius"])) if isinstance(c, dict) else tuple(map(float, c))
                for c in data["circles"]
            ]
            if any(len(c) != 2 for c in circles):
                raise ValueError("each circle needs an alpha and a radius")
            return cls(str(data.get("name", "custom")), float(data["period_t"]), tuple(circles))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidConfig(f"malformed configuration JSON: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


BUILTIN_KINDS = ("classical", "ap3", "ap9")


def build_config(kind: str) -> FordConfig:
    """One of the built-in configurations ``classical``, ``ap3`` or ``ap9``."""
    if kind == "classical":
        return FordConfig("classical", 2.0, ((0.0, 0.5), (1.0, 0.5)))
    if kind == "ap3":
        return FordConfig("ap3", 2 * SQRT2, ((0.0, 0.5), (SQRT2 / 2, 0.25), (SQRT2, 0.5)))
    if kind == "ap9":
        small = (3 - SQRT5) / 4
        return FordConfig(
            "ap9",
            1 + SQRT5,
            ((0.0, 0.5), ((SQRT5 - 1) / 2, small), (1.0, small), (PHI, 0.5)),
        )
    raise ValueError(f"unknown configuration kind {kind!r}; expected one of {BUILTIN_KINDS}")


def load_config(source) -> FordConfig:
    """Built-in name or path to a JSON file."""
    if isinstance(source, FordConfig):
        return source
    if str(source) in BUILTIN_KINDS:
        return build_config(str(source))
    path = Path(source)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot read configuration {source!r}: {exc}") from exc
    return FordConfig.from_dict(data)


# validation -----------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    circles: tuple = field(default=())

    def __str__(self):
        who = ",".join(f"C{i}" for i in self.circles)
        return f"{self.kind}({who}): {self.message}" if who else f"{self.kind}: {self.message}"


def TangencyViolation(i, j, msg):
    return Violation("TangencyViolation", msg, (i, j))


def validate_config(cfg: FordConfig, tol: float = 1e-9) -> list:
    """All violated invariants of ``cfg`` (empty when valid)."""
    out = []
    if cfg.h < 3:
        out.append(Violation("SizeViolation", f"need at least two circles, got {cfg.h - 1}"))
        return out
    if not cfg.period_t > 0:
        out.append(Violation("PeriodViolation", f"period must be positive, got {cfg.period_t}"))
    alphas = [a for a, _ in cfg.circles]
    radii = [r for _, r in cfg.circles]
    for k, r in enumerate(radii, start=2):
        if not r > 0:
            out.append(Violation("RadiusViolation", f"radius {r} is not positive", (k,)))
        elif r > 0.5 + tol:
            out.append(Violation("StripViolation", f"radius {r} leaves the strip 0 <= Im z <= 1", (k,)))
    if out:
        return out
    for k in range(len(alphas) - 1):
        if not alphas[k + 1] > alphas[k]:
            out.append(Violation("OrderViolation", "tangencies must increase", (k + 2, k + 3)))
    if abs(alphas[0]) > tol or abs(radii[0] - 0.5) > tol:
        out.append(Violation("AnchorViolation", "C2 must be C(i/2, 1/2)", (2,)))
    if abs(alphas[-1] - cfg.period_t / 2) > tol:
        out.append(
            Violation("PeriodViolation", f"alpha_h = {alphas[-1]} differs from t/2 = {cfg.period_t / 2}", (cfg.h,))
        )
    if abs(radii[-1] - 0.5) > tol:
        out.append(Violation("AnchorViolation", "C_h must have radius 1/2", (cfg.h,)))
    for k in range(1, len(radii) - 1):
        if radii[k] > 0.5 - tol:
            out.append(
                Violation("StripViolation", "interior circle touches the top line", (k + 2,))
            )
    centers = [complex(a, r) for a, r in cfg.circles]
    for k in range(len(centers)):
        for m in range(k + 1, len(centers)):
            dist = abs(centers[k] - centers[m])
            rsum = radii[k] + radii[m]
            if m == k + 1:
                if abs(dist - rsum) > tol * max(1.0, rsum):
                    out.append(
                        TangencyViolation(k + 2, m + 2, f"center distance {dist:.12g} != r_i + r_j = {rsum:.12g}")
                    )
            elif dist < rsum - tol:
                out.append(Violation("OverlapViolation", "circles overlap", (k + 2, m + 2)))
    return out


def require_valid(cfg: FordConfig, tol: float = 1e-9) -> FordConfig:
    v = validate_config(cfg, tol)
    if v:
        raise InvalidConfig("; ".join(map(str, v)), v)
    return cfg


# constants ------------------------------------------------------------------


@dataclass(frozen=True)
class PackingConstants:
    D_i: tuple
    D: float
    c: float
    area_gamma: float
    delta: float


def cusp_areas(cfg: FordConfig) -> np.ndarray:
    """The cusp contributions ``D_1, ..., D_h`` in closed form."""
    require_valid(cfg)
    h = cfg.h
    out = np.empty(h)
    out[0] = cfg.alpha(h)
    for i in range(2, h + 1):
        ai, ri = cfg.alpha(i), cfg.radius(i)
        prev = cfg.alpha(i - 1) if i > 2 else math.inf
        nxt = cfg.alpha(i + 1) if i < h else math.inf
        if math.isinf(prev):
            val = 2 * ri / abs(nxt - ai)
        elif math.isinf(nxt):
            val = 2 * ri / abs(prev - ai)
        else:
            val = 2 * ri * abs((nxt - prev) / ((nxt - ai) * (prev - ai)))
        out[i - 1] = val
    return out


def cusp_areas_numeric(cfg: FordConfig) -> np.ndarray:
    """Cusp contributions by direct hyperbolic area integration.

    ``D_i`` is the hyperbolic area of the part of the horodisk bounded by
    ``C_i`` lying inside the ideal polygon with vertices ``inf, alpha_2, ...,
    alpha_h`` (the vertical sides are ``Re z = 0`` and ``Re z = t/2``).
    """
    require_valid(cfg)
    h = cfg.h
    alphas = np.array([cfg.alpha(i) for i in range(2, h + 1)])
    half = cfg.period_t / 2
    mids = (alphas[:-1] + alphas[1:]) / 2
    rads = (alphas[1:] - alphas[:-1]) / 2

    def floor_height(x):
        y = 0.0
        for m, R in zip(mids, rads):
            if abs(x - m) < R:
                y = max(y, math.sqrt(R * R - (x - m) ** 2))
        return y

    out = np.empty(h)
    out[0] = half  # strip of width t/2 above height 1
    for i in range(2, h + 1):
        a, r = cfg.alpha(i), cfg.radius(i)

        def integrand(x, a=a, r=r):
            s = r * r - (x - a) ** 2
            if s <= 0:
                return 0.0
            top = r + math.sqrt(s)
            low = max(r - math.sqrt(s), floor_height(x))
            return max(0.0, 1.0 / low - 1.0 / top) if low > 0 else 0.0

        lo, hi = max(a - r, 0.0), min(a + r, half)
        pts = [p for p in (a, *alphas) if lo < p < hi]
        # the integrand blows up like 1/|x - a| cancelled by the geodesics; split at a
        total = 0.0
        edges = sorted({lo, hi, *pts})
        for x0, x1 in zip(edges[:-1], edges[1:]):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, _ = integrate.quad(integrand, x0, x1, limit=400, epsabs=1e-13, epsrel=1e-12)
            total += val
        out[i - 1] = total
    return out


def constants(cfg: FordConfig) -> PackingConstants:
    from .theory import support_threshold  # local import: theory depends on config

    Di = cusp_areas(cfg)
    D = float(Di.sum())
    h = cfg.h
    c = D / (2 * math.pi**2 * (h - 2))
    return PackingConstants(
        D_i=tuple(float(x) for x in Di),
        D=D,
        c=c,
        area_gamma=2 * math.pi * (h - 2),
        delta=support_threshold(cfg),
    )


def packing_constant(cfg: FordConfig) -> float:
    """``c`` alone (cheap; avoids the threshold computation)."""
    return float(cusp_areas(cfg).sum()) / (2 * math.pi**2 * (cfg.h - 2))


# reflections ----------------------------------------------------------------


def gap_reflections(cfg: FordConfig) -> list:
    """Reflections ``S_1, ..., S_h``; ``S_i`` is the inversion in the dual circle
    of the gap bounded by ``R``, ``C_i`` and ``C_{i+1}`` (with ``C_{h+1} = C_1``)."""
    require_valid(cfg)
    base = cfg.circle(0)
    out = []
    for i in range(1, cfg.h + 1):
        j = i + 1 if i < cfg.h else 1
        out.append(inversion_in(dual_circle(base, cfg.circle(i), cfg.circle(j))))
    return out


def pair_reflection(cfg: FordConfig, i: int, j: int) -> AntiMobiusMap:
    """``S_{i,j}``: reflection of the gap between tangent ``C_i``, ``C_j`` and ``R``."""
    Ki, Kj = cfg.circle(i), cfg.circle(j)
    if i == j or not are_tangent(Ki, Kj):
        raise InvalidPair(f"C{i} and C{j} are not tangent")
    return inversion_in(dual_circle(cfg.circle(0), Ki, Kj))
