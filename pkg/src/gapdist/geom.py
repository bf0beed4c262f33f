"""Plane inversive geometry in Hermitian coordinates.

A generalized circle is stored as the triple ``(A, B, C)`` describing the locus

    A |z|^2 + 2 Re(conj(B) z) + C = 0,

normalized so that ``|B|^2 - A C = 1``.  Proper circles have ``A > 0``; lines
have ``A = 0`` and a unit normal ``B``.  Mobius maps act on the Hermitian
matrix ``[[A, B], [conj(B), C]]`` by congruence, so lines and circles never
need separate code paths.

Points of the extended plane are homogeneous pairs (:class:`ExtendedPoint`),
which keeps infinity exact.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import NotMutuallyTangent, NotTangent, PointOffCircle

DEFAULT_TOL = 1e-9
# below this |A| (relative to |B| = 1) a normalized circle is treated as a line
_LINE_EPS = 1e-12


@dataclass(frozen=True)
class ExtendedPoint:
    """Point of the Riemann sphere as a homogeneous pair ``num : den``."""

    num: complex
    den: complex = 1.0

    @classmethod
    def of(cls, z) -> "ExtendedPoint":
        if isinstance(z, ExtendedPoint):
            return z
        return cls(complex(z), 1.0 + 0j)

    @property
    def is_infinite(self) -> bool:
        return abs(self.den) <= 1e-300 or abs(self.den) <= 1e-15 * abs(self.num)

    @property
    def value(self) -> complex:
        """Finite value; raises ``OverflowError`` at infinity."""
        if self.is_infinite:
            raise OverflowError("point at infinity has no finite value")
        return complex(self.num) / complex(self.den)

    def isclose(self, other, tol: float = DEFAULT_TOL) -> bool:
        other = ExtendedPoint.of(other)
        if self.is_infinite or other.is_infinite:
            return self.is_infinite and other.is_infinite
        return abs(self.value - other.value) <= tol * max(1.0, abs(other.value))

    def __repr__(self):
        if self.is_infinite:
            return "ExtendedPoint(inf)"
        return f"ExtendedPoint({self.value!r})"


INFINITY = ExtendedPoint(1.0 + 0j, 0j)
Pointlike = Union[complex, float, ExtendedPoint]


def _to_point(z) -> ExtendedPoint:
    return ExtendedPoint.of(z)


@dataclass(frozen=True)
class GeneralizedCircle:
    """Circle or line ``A|z|^2 + 2Re(conj(B) z) + C = 0`` (normalized)."""

    A: float
    B: complex
    C: float

    def __post_init__(self, _scaled: bool = False):
        A, B, C = float(np.real(self.A)), complex(self.B), float(np.real(self.C))
        if not _scaled:
            disc = abs(B) ** 2 - A * C
            if not disc > 0:
                raise ValueError(f"degenerate generalized circle (|B|^2 - AC = {disc})")
            s = 1.0 / math.sqrt(disc)
            A, B, C = A * s, B * s, C * s
        if abs(A) <= _LINE_EPS:
            A = 0.0
            # canonical line orientation: Im B > 0, or Re B > 0 when horizontal normal
            if B.imag < -1e-15 or (abs(B.imag) <= 1e-15 and B.real < 0):
                B, C = -B, -C
        elif A < 0:
            A, B, C = -A, -B, -C
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    # constructors
    @classmethod
    def from_center_radius(cls, center, radius: float) -> "GeneralizedCircle":
        center = complex(center)
        if not radius > 0:
            raise ValueError("radius must be positive")
        return cls(1.0 / radius, -center / radius, (abs(center) ** 2 - radius**2) / radius)

    @classmethod
    def tangent_to_axis(cls, alpha: float, radius: float) -> "GeneralizedCircle":
        """The circle ``C(alpha + i r, r)`` touching the real axis at ``alpha``."""
        return cls.from_center_radius(complex(alpha, radius), radius)

    @classmethod
    def line_through(cls, p, q) -> "GeneralizedCircle":
        p, q = complex(p), complex(q)
        if abs(q - p) == 0:
            raise ValueError("two distinct points are needed for a line")
        u = (q - p) / abs(q - p)
        normal = 1j * u
        return cls(0.0, normal, -2.0 * (normal.conjugate() * p).real)

    @classmethod
    def horizontal_line(cls, y: float) -> "GeneralizedCircle":
        """The line ``Im z = y``."""
        return cls(0.0, 1j, -2.0 * y)

    @classmethod
    def vertical_line(cls, x: float) -> "GeneralizedCircle":
        """The line ``Re z = x``."""
        return cls(0.0, 1.0, -2.0 * x)

    @classmethod
    def real_axis(cls) -> "GeneralizedCircle":
        return cls(0.0, 1j, 0.0)

    @classmethod
    def through_points(cls, p1, p2, p3, tol: float = DEFAULT_TOL) -> "GeneralizedCircle":
        """Generalized circle through three distinct extended points."""
        pts = [_to_point(p) for p in (p1, p2, p3)]
        inf = [p.is_infinite for p in pts]
        if sum(inf) > 1:
            raise ValueError("at most one point may be infinite")
        if any(inf):
            a, b = [p.value for p in pts if not p.is_infinite]
            return cls.line_through(a, b)
        a, b, c = (p.value for p in pts)
        # circumcenter relative to a
        bb, cc = b - a, c - a
        cross = (bb.conjugate() * cc).imag
        scale = max(abs(bb), abs(cc)) ** 2
        if abs(cross) <= 1e-14 * scale:
            return cls.line_through(a, b if abs(bb) > 0 else c)
        center = a + 1j * (abs(bb) ** 2 * cc - abs(cc) ** 2 * bb) / (2 * cross) * -1
        return cls.from_center_radius(center, abs(center - a))

    # properties
    @property
    def is_line(self) -> bool:
        return self.A == 0.0

    @property
    def center(self) -> complex:
        if self.is_line:
            raise ValueError("a line has no center")
        return -self.B / self.A

    @property
    def radius(self) -> float:
        return math.inf if self.is_line else 1.0 / self.A

    @property
    def curvature(self) -> float:
        return self.A

    def hermitian(self) -> np.ndarray:
        return np.array([[self.A, self.B], [self.B.conjugate(), self.C]], dtype=complex)

    @classmethod
    def from_hermitian(cls, H, normalized: bool = False) -> "GeneralizedCircle":
        """Circle of a Hermitian matrix.

        With ``normalized=True`` the caller guarantees ``|B|^2 - AC = 1`` and
        no rescaling is done, which avoids cancellation for tiny circles.
        """
        H = np.asarray(H)
        out = object.__new__(cls)
        object.__setattr__(out, "A", H[0, 0].real)
        object.__setattr__(out, "B", complex(H[0, 1]))
        object.__setattr__(out, "C", H[1, 1].real)
        out.__post_init__(_scaled=normalized)
        return out

    def residual(self, z) -> float:
        """Signed residual, roughly twice the distance from ``z`` to the locus.

        At infinity the residual is ``0`` for lines and ``inf`` for circles.
        """
        p = _to_point(z)
        if p.is_infinite:
            return 0.0 if self.is_line else math.inf
        w = p.value
        return self.A * abs(w) ** 2 + 2.0 * (self.B.conjugate() * w).real + self.C

    def contains_point(self, z, tol: float = DEFAULT_TOL) -> bool:
        return abs(self.residual(z)) <= 2 * tol * max(1.0, abs(self.C))

    def isclose(self, other: "GeneralizedCircle", tol: float = DEFAULT_TOL) -> bool:
        def close(s):
            return (
                abs(self.A - s * other.A) <= tol * max(1.0, abs(other.A))
                and abs(self.B - s * other.B) <= tol * max(1.0, abs(other.B))
                and abs(self.C - s * other.C) <= tol * max(1.0, abs(other.C))
            )

        return close(1.0) or (abs(self.A) <= tol and close(-1.0))

    def __repr__(self):
        if self.is_line:
            return f"GeneralizedCircle(line: B={self.B:.6g}, C={self.C:.6g})"
        return f"GeneralizedCircle(center={self.center:.6g}, radius={self.radius:.6g})"


def inversive_product(K1: GeneralizedCircle, K2: GeneralizedCircle) -> float:
    """Inversive product; ``+-1`` for tangent pairs and ``0`` for orthogonal ones."""
    return 0.5 * (K1.A * K2.C + K2.A * K1.C) - (K1.B * K2.B.conjugate()).real


def are_tangent(K1, K2, tol: float = DEFAULT_TOL) -> bool:
    return abs(abs(inversive_product(K1, K2)) - 1.0) <= tol


def tangency_point(K1: GeneralizedCircle, K2: GeneralizedCircle, tol: float = DEFAULT_TOL) -> ExtendedPoint:
    """Common point of two tangent generalized circles."""
    if not are_tangent(K1, K2, tol):
        raise NotTangent(f"circles are not tangent (inversive product {inversive_product(K1, K2):.12g})")
    if K1.is_line and K2.is_line:
        return INFINITY
    if K1.is_line or K2.is_line:
        line, circ = (K1, K2) if K1.is_line else (K2, K1)
        c = circ.center
        return ExtendedPoint.of(c - 0.5 * line.residual(c) * line.B)
    c1, c2 = K1.center, K2.center
    r1, r2 = K1.radius, K2.radius
    d = abs(c2 - c1)
    if d == 0:
        raise NotTangent("concentric circles")
    if inversive_product(K1, K2) > 0:  # external
        return ExtendedPoint.of(c1 + (c2 - c1) * (r1 / (r1 + r2)))
    # internal: point on the larger circle in the direction of the smaller
    if r1 >= r2:
        return ExtendedPoint.of(c1 + (c2 - c1) / d * r1)
    return ExtendedPoint.of(c2 + (c1 - c2) / d * r2)


def _normalize_sl2(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det == 0:
        raise ValueError("singular matrix")
    return m / cmath.sqrt(det)


@dataclass(frozen=True)
class MobiusMap:
    """Orientation preserving map ``z -> (az+b)/(cz+d)`` with ``ad-bc = 1``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        m = _normalize_sl2([[self.a, self.b], [self.c, self.d]])
        for name, v in zip("abcd", m.ravel()):
            object.__setattr__(self, name, complex(v))

    @classmethod
    def from_matrix(cls, m) -> "MobiusMap":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def is_anti(self) -> bool:
        return False

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def __call__(self, z):
        return mobius_apply_point(self, z)

    def __matmul__(self, other):
        return compose(self, other)

    def derivative_abs(self, x):
        """``|M'(x)| = 1/|cx+d|^2`` (vectorized over real or complex ``x``)."""
        return 1.0 / np.abs(self.c * np.asarray(x) + self.d) ** 2


@dataclass(frozen=True)
class AntiMobiusMap:
    """Orientation reversing map ``z -> M(conj(z))``."""

    mobius: MobiusMap

    @classmethod
    def from_matrix(cls, m) -> "AntiMobiusMap":
        return cls(MobiusMap.from_matrix(m))

    @property
    def matrix(self) -> np.ndarray:
        return self.mobius.matrix

    @property
    def is_anti(self) -> bool:
        return True

    def inverse(self) -> "AntiMobiusMap":
        # (M o conj)^-1 = conj o M^-1 = conj(M^-1) o conj
        return AntiMobiusMap(MobiusMap.from_matrix(np.conj(self.mobius.inverse().matrix)))

    def __call__(self, z):
        return mobius_apply_point(self, z)

    def __matmul__(self, other):
        return compose(self, other)


AnyMap = Union[MobiusMap, AntiMobiusMap]


def compose(f: AnyMap, g: AnyMap) -> AnyMap:
    """The map ``f o g`` with parity tracking."""
    mf, mg = f.matrix, g.matrix
    if f.is_anti:
        m = mf @ np.conj(mg)
        return MobiusMap.from_matrix(m) if g.is_anti else AntiMobiusMap.from_matrix(m)
    m = mf @ mg
    return AntiMobiusMap.from_matrix(m) if g.is_anti else MobiusMap.from_matrix(m)


def projective_distance(m1, m2) -> float:
    """Entrywise distance between two matrices modulo a nonzero scalar.

    Each matrix is scaled so that its largest entry equals 1 (phase included);
    the result is the max entrywise difference.
    """

    def canon(m):
        m = np.asarray(m, dtype=complex)
        k = np.argmax(np.abs(m))
        return m / m.flat[k]

    return float(np.max(np.abs(canon(m1) - canon(m2))))


def mobius_apply_point(M: AnyMap, z) -> ExtendedPoint:
    p = _to_point(z)
    num, den = complex(p.num), complex(p.den)
    if M.is_anti:
        num, den = num.conjugate(), den.conjugate()
        M = M.mobius
    return ExtendedPoint(M.a * num + M.b * den, M.c * num + M.d * den)


def _transform_hermitian(m: np.ndarray, H: np.ndarray) -> np.ndarray:
    # circle {w^* H w = 0}; image under w' = m w is {w'^* N^* H N w' = 0}, N = m^-1
    n = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    return n.conj().T @ H @ n


def mobius_apply_circle(M: AnyMap, K: GeneralizedCircle) -> GeneralizedCircle:
    H = K.hermitian()
    if M.is_anti:
        H = H.conj()
    # det N has modulus one, so |B|^2 - AC is preserved and needs no rescaling
    return GeneralizedCircle.from_hermitian(_transform_hermitian(M.matrix, H), normalized=True)


def reflect_circle(R: AntiMobiusMap, K: GeneralizedCircle) -> GeneralizedCircle:
    """Image of ``K`` under an orientation reversing map."""
    if not R.is_anti:
        raise TypeError("reflect_circle expects an AntiMobiusMap")
    return mobius_apply_circle(R, K)


def inversion_in(K: GeneralizedCircle) -> AntiMobiusMap:
    """Inversion in a circle, or reflection in a line."""
    return AntiMobiusMap.from_matrix([[-K.B, -K.C], [K.A, K.B.conjugate()]])


def dual_circle(K1, K2, K3, tol: float = DEFAULT_TOL) -> GeneralizedCircle:
    """Circle through the three pairwise tangency points of a triangular gap."""
    pairs = ((K1, K2), (K1, K3), (K2, K3))
    for a, b in pairs:
        if not are_tangent(a, b, tol):
            raise NotMutuallyTangent(
                f"pair not tangent (inversive product {inversive_product(a, b):.12g})"
            )
    pts = [tangency_point(a, b, tol) for a, b in pairs]
    return GeneralizedCircle.through_points(*pts)


def tangency_on_base(K: GeneralizedCircle, base: GeneralizedCircle, tol: float = DEFAULT_TOL):
    """Location of the tangency of ``K`` with ``base`` and the curvature of ``K``.

    For a line base the location is the coordinate along the line measured from
    the foot of the origin (the real part when ``base`` is the real axis); for
    a circular base it is the counterclockwise arc length from the rightmost
    point.
    """
    p = tangency_point(K, base, tol)
    if p.is_infinite:
        raise NotTangent("tangency at infinity")
    z = p.value
    if base.is_line:
        foot = -0.5 * base.C * base.B
        along = 1j * base.B.conjugate()
        alpha = ((z - foot) * along.conjugate()).real
    else:
        ang = cmath.phase(z - base.center) % (2 * math.pi)
        alpha = base.radius * ang
    return float(alpha), float(K.curvature)


def arc_distance(base: GeneralizedCircle, p, q, tol: float = DEFAULT_TOL) -> float:
    for z in (p, q):
        if not base.contains_point(z, tol):
            raise PointOffCircle(f"point {z} is not on the base")
    p, q = _to_point(p).value, _to_point(q).value
    if base.is_line:
        return abs(p - q)
    c, r = base.center, base.radius
    dth = abs(cmath.phase((q - c) / (p - c)))
    return r * min(dth, 2 * math.pi - dth)


def _three_point_map(z1: ExtendedPoint, z2: ExtendedPoint, z3: ExtendedPoint) -> np.ndarray:
    """Matrix sending ``z1 -> 0``, ``z2 -> inf``, ``z3 -> 1``."""
    a1, b1 = z1.num, z1.den
    a2, b2 = z2.num, z2.den
    a3, b3 = z3.num, z3.den
    k1 = a3 * b2 - a2 * b3
    k2 = a3 * b1 - a1 * b3
    return np.array([[k1 * b1, -k1 * a1], [k2 * b2, -k2 * a2]], dtype=complex)


def ford_normalize(K1, K2, K3, tol: float = DEFAULT_TOL) -> MobiusMap:
    """Mobius map carrying a tangent triple to ``(R, R + i, C(i/2, 1/2))``.

    With ``a1 = K1 ^ K2``, ``a2 = K1 ^ K3`` and ``b = K2 ^ K3`` the result sends
    ``a1 -> inf``, ``a2 -> 0`` and ``b -> i``.
    """
    for a, b in ((K1, K2), (K1, K3), (K2, K3)):
        if not are_tangent(a, b, tol):
            raise NotMutuallyTangent("ford_normalize needs a mutually tangent triple")
    a1 = tangency_point(K1, K2, tol)
    a2 = tangency_point(K1, K3, tol)
    b = tangency_point(K2, K3, tol)
    m = np.diag([1j, 1.0]) @ _three_point_map(a2, a1, b)
    return MobiusMap.from_matrix(m)


# vectorized helpers ---------------------------------------------------------


def circles_from_tangencies(alpha, radius):
    """Hermitian coefficients ``(A, B, C)`` of circles ``C(alpha + i r, r)``."""
    alpha = np.asarray(alpha, dtype=float)
    radius = np.asarray(radius, dtype=float)
    center = alpha + 1j * radius
    return 1.0 / radius, -center / radius, (np.abs(center) ** 2 - radius**2) / radius


def mobius_apply_circles(M: AnyMap, A, B, C):
    """Vectorized circle images of normalized ``(A, B, C)`` arrays; the output has ``A >= 0``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=complex)
    C = np.asarray(C, dtype=float)
    if M.is_anti:
        B = np.conj(B)
    m = M.matrix
    # adjugate of a det-1 matrix; the determinant of H is then preserved
    p, q, r, s = m[1, 1], -m[0, 1], -m[1, 0], m[0, 0]
    # (N^* H N) entries for H = [[A, B], [conj B, C]]
    A2 = (A * abs(p) ** 2 + 2 * np.real(np.conj(p) * B * r) + C * abs(r) ** 2)
    B2 = A * np.conj(p) * q + np.conj(p) * B * s + np.conj(r) * np.conj(B) * q + C * np.conj(r) * s
    C2 = (A * abs(q) ** 2 + 2 * np.real(np.conj(q) * B * s) + C * abs(s) ** 2)
    sign = np.where(A2 < 0, -1.0, 1.0)
    return sign * A2, sign * B2, sign * C2
