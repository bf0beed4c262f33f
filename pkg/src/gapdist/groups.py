"""Matrix groups: generators, Hecke groups, word identities, coordinates, census."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BallNotSaturated, IdentityFailed, InvalidQ, UpperTriangular

SQRT2 = math.sqrt(2.0)
SQRT5 = math.sqrt(5.0)

# q of the Hecke group containing each built-in group
HECKE_Q = {"classical": 3, "ap3": 4, "ap9": 5}


def projective_normalize(m) -> np.ndarray:
    """Fix the sign so that the first nonzero entry is positive."""
    m = np.asarray(m, dtype=float)
    flat = m.ravel()
    nz = np.flatnonzero(np.abs(flat) > 1e-14 * max(1.0, np.abs(flat).max()))
    if len(nz) and flat[nz[0]] < 0:
        m = -m
    return m


def projective_error(m1, m2) -> float:
    """``min(|m1 - m2|, |m1 + m2|)`` entrywise max (equality in PSL)."""
    m1, m2 = np.asarray(m1, dtype=float), np.asarray(m2, dtype=float)
    return float(min(np.abs(m1 - m2).max(), np.abs(m1 + m2).max()))


@dataclass(frozen=True)
class GroupElement:
    matrix: np.ndarray
    word: tuple = field(default=())

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        det = np.linalg.det(m)
        if abs(det - 1) > 1e-12 * max(1.0, np.abs(m).max() ** 2):
            raise ValueError(f"determinant {det} is not 1")
        object.__setattr__(self, "matrix", projective_normalize(m))

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.matrix @ other.matrix, self.word + other.word)

    def inverse(self) -> "GroupElement":
        a, b, c, d = self.matrix.ravel()
        return GroupElement(np.array([[d, -b], [-c, a]]), tuple(-w for w in reversed(self.word)))


def _m(a, b, c, d):
    return np.array([[a, b], [c, d]], dtype=float)


def gamma_generators(kind: str) -> list:
    """Generators of the orientation preserving group of a built-in packing."""
    if kind == "classical":
        mats = [_m(1, 2, 0, 1), _m(1, 0, 2, 1)]
    elif kind == "ap3":
        r = 2 * SQRT2
        mats = [_m(1, r, 0, 1), _m(1, 0, r, 1), _m(3, -r, -r, 3)]
    elif kind == "ap9":
        mats = [
            _m(1, 1 + SQRT5, 0, 1),
            _m(1, 0, 1 + SQRT5, 1),
            _m(2 + SQRT5, 3 + SQRT5, 1 + SQRT5, 2 + SQRT5),
            _m(2 + SQRT5, 1 + SQRT5, 3 + SQRT5, 2 + SQRT5),
        ]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return [GroupElement(m, (k + 1,)) for k, m in enumerate(mats)]


def hecke_generators(q: int):
    """``S = (0, -1; 1, 0)`` and ``T_q = (1, lambda_q; 0, 1)``, ``lambda_q = 2 cos(pi/q)``."""
    if int(q) != q or q < 3:
        raise InvalidQ(f"q must be an integer >= 3, got {q}")
    lam = 2 * math.cos(math.pi / q)
    return _m(0, -1, 1, 0), _m(1, lam, 0, 1)


@dataclass
class IdentityCheck:
    name: str
    error: float
    passed: bool


@dataclass
class NormalityReport:
    kind: str
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __str__(self):
        lines = [f"{self.kind}: {'all identities hold' if self.ok else 'FAILED'}"]
        for c in self.checks:
            lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name}  (error {c.error:.2e})")
        return "\n".join(lines)


def _identities(kind: str):
    """``(name, lhs, rhs)`` matrix pairs to compare projectively."""
    inv = np.linalg.inv
    q = HECKE_Q[kind]
    S, T = hecke_generators(q)
    Ti = inv(T)
    Si = inv(S)
    g = [e.matrix for e in gamma_generators(kind)]
    out = []
    if kind == "classical":
        g1, g2 = g
        out += [
            ("g1 = T^2", g1, T @ T),
            ("g2 = S T^-2 S^-1", g2, S @ Ti @ Ti @ Si),
            ("S g1 S^-1 = g2^-1", S @ g1 @ Si, inv(g2)),
            ("S g2 S^-1 = g1^-1", S @ g2 @ Si, inv(g1)),
            ("T g1 T^-1 = g1", T @ g1 @ Ti, g1),
            ("T g2 T^-1 = -g1 g2^-1", T @ g2 @ Ti, -g1 @ inv(g2)),
        ]
    elif kind == "ap3":
        g1, g2, g3 = g
        out += [
            ("g1 = T4^2", g1, T @ T),
            ("g2 = S T4^-2 S^-1", g2, S @ Ti @ Ti @ Si),
            ("g3 = T4^-1 S T4^-2 S T4^-1", g3, Ti @ S @ Ti @ Ti @ S @ Ti),
            ("S g1 S^-1 = g2^-1", S @ g1 @ Si, inv(g2)),
            ("S g2 S^-1 = g1^-1", S @ g2 @ Si, inv(g1)),
            ("S g3 S^-1 = g3^-1", S @ g3 @ Si, inv(g3)),
            ("T4 g1 T4^-1 = g1", T @ g1 @ Ti, g1),
            ("T4 g2 T4^-1 = -g1 g3", T @ g2 @ Ti, -g1 @ g3),
            ("T4 g3 T4^-1 = -g2 T(-2sqrt2)", T @ g3 @ Ti, -g2 @ _m(1, -2 * SQRT2, 0, 1)),
        ]
    elif kind == "ap9":
        h1, h2, h3, h4 = g
        out += [
            ("h1 = T5^2", h1, T @ T),
            ("h2 = S T5^-2 S^-1", h2, S @ Ti @ Ti @ Si),
            ("h3 = T5 S T5^2 S T5", h3, T @ S @ T @ T @ S @ T),
            ("h4 = S T5^-1 S T5^-2 S T5^-1 S^-1", h4, S @ Ti @ S @ Ti @ Ti @ S @ Ti @ Si),
            ("S h1 S^-1 = h2^-1", S @ h1 @ Si, inv(h2)),
            ("S h2 S^-1 = h1^-1", S @ h2 @ Si, inv(h1)),
            ("S h3 S^-1 = h4^-1", S @ h3 @ Si, inv(h4)),
            ("S h4 S^-1 = h3^-1", S @ h4 @ Si, inv(h3)),
            ("T5 h1 T5^-1 = h1", T @ h1 @ Ti, h1),
            ("T5 h2 T5^-1 = -h1 h3^-1", T @ h2 @ Ti, -h1 @ inv(h3)),
            ("T5 h3 T5^-1 = -h1 h2^-1", T @ h3 @ Ti, -h1 @ inv(h2)),
            ("T5 h4 T5^-1 = -h1 h4^-1", T @ h4 @ Ti, -h1 @ inv(h4)),
        ]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    ST = S @ T
    P = np.eye(2)
    for _ in range(q):
        P = P @ ST
    out.append((f"(S T{q})^{q} = +-I", P, np.eye(2)))
    return out


def normality_check(kind: str, tol: float = 1e-12, strict: bool = True) -> NormalityReport:
    """Verify the conjugation and membership identities of a built-in group.

    With ``strict`` the first failing identity raises :class:`IdentityFailed`.
    """
    checks = []
    for name, lhs, rhs in _identities(kind):
        err = projective_error(lhs, rhs)
        ok = err <= tol * max(1.0, np.abs(rhs).max())
        checks.append(IdentityCheck(name, err, ok))
        if strict and not ok:
            raise IdentityFailed(name, err)
    return NormalityReport(kind, checks)


def hecke_relation_error(q: int) -> float:
    S, T = hecke_generators(q)
    P = np.linalg.matrix_power(S @ T, q)
    return projective_error(P, np.eye(2))


# coordinates ----------------------------------------------------------------


@dataclass(frozen=True)
class IwasawaCoords:
    x: float
    y: float
    theta: float

    def compose(self) -> np.ndarray:
        """``N(x) A(y) K(theta)`` with ``A(y) = diag(y^-1/2, y^1/2)``."""
        N = _m(1, self.x, 0, 1)
        A = np.diag([self.y**-0.5, self.y**0.5])
        c, s = math.cos(self.theta), math.sin(self.theta)
        K = _m(c, -s, s, c)
        return N @ A @ K


def _matrix(g):
    return g.matrix if isinstance(g, GroupElement) else np.asarray(g, dtype=float)


def iwasawa_decompose(g) -> IwasawaCoords:
    """Coordinates with ``(sqrt(y), theta)`` the polar form of the row ``(d, c)``.

    The angle is folded into ``[0, pi)`` using ``g = -g``.
    """
    a, b, c, d = _matrix(g).ravel()
    theta = math.atan2(c, d)
    if theta < 0 or theta >= math.pi:
        a, b, c, d = -a, -b, -c, -d
        theta = math.atan2(c, d)
        if theta >= math.pi:
            theta -= math.pi
    y = c * c + d * d
    x = (a * c + b * d) / y
    return IwasawaCoords(x, y, theta)


@dataclass(frozen=True)
class GoodCoords:
    theta1: float
    theta2: float
    nu: float

    def compose(self) -> np.ndarray:
        """``N(theta1) (0, -nu^-1/2; nu^1/2, 0) N(theta2)``."""
        c = math.sqrt(self.nu)
        return _m(1, self.theta1, 0, 1) @ _m(0, -1 / c, c, 0) @ _m(1, self.theta2, 0, 1)


def good_decompose(g) -> GoodCoords:
    """Bruhat-type coordinates ``(theta1, theta2, nu)`` with ``nu = c^2``."""
    a, b, c, d = _matrix(g).ravel()
    if abs(c) <= 1e-14 * max(1.0, abs(a), abs(d)):
        raise UpperTriangular("lower-left entry vanishes")
    if c < 0:
        a, b, c, d = -a, -b, -c, -d
    return GoodCoords(a / c, d / c, c * c)


# census ---------------------------------------------------------------------


def _keys(mats: np.ndarray) -> np.ndarray:
    """Hashable row keys of projectively normalized, rounded matrices."""
    flat = mats.reshape(-1, 4)
    lead = np.argmax(np.abs(flat) > 1e-9, axis=1)
    sign = np.sign(flat[np.arange(len(flat)), lead])
    key = np.ascontiguousarray(np.round(flat * sign[:, None], 12) + 0.0)
    return key.view(np.dtype((np.void, key.dtype.itemsize * 4))).ravel()


def word_ball(generators, radius: int) -> np.ndarray:
    """All distinct group elements (up to sign) of word length at most ``radius``."""
    gens = [_matrix(g) for g in generators]
    gens = np.array(gens + [np.linalg.inv(g) for g in gens])
    ball = np.eye(2)[None]
    seen = _keys(ball)
    frontier = ball
    for _ in range(radius):
        cand = np.einsum("nij,gjk->ngik", frontier, gens).reshape(-1, 2, 2)
        keys = _keys(cand)
        keys, idx = np.unique(keys, return_index=True)
        fresh = ~np.isin(keys, seen)
        frontier = cand[idx[fresh]]
        if len(frontier) == 0:
            break
        seen = np.concatenate([seen, keys[fresh]])
        ball = np.concatenate([ball, frontier])
    return ball


def _census_count(mats, T, I, J):
    a, b, c, d = (mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1])
    theta = np.arctan2(c, d)
    flip = (theta < 0) | (theta >= math.pi)
    a, b, c, d = (np.where(flip, -v, v) for v in (a, b, c, d))
    theta = np.arctan2(c, d)
    theta = np.where(theta >= math.pi, theta - math.pi, theta)
    y = c * c + d * d
    x = (a * c + b * d) / y
    m = (y < T) & (x >= I[0]) & (x < I[1]) & (theta >= J[0]) & (theta < J[1])
    return int(np.count_nonzero(m))


def good_census(kind: str, T: float, I=(0.0, 1.0), J=(0.0, math.pi), max_word_len: int = 8):
    """Count ``{gamma : x in I, y < T, theta in J}`` and the leading-term prediction.

    The word ball of radius ``max_word_len`` must already contain every such
    element; this is checked against the ball of radius ``max_word_len + 2``
    and :class:`BallNotSaturated` is raised otherwise.  Slow; diagnostic only.
    """
    gens = gamma_generators(kind)
    h = {"classical": 3, "ap3": 4, "ap9": 5}[kind]
    area = 2 * math.pi * (h - 2)
    big = word_ball(gens, max_word_len + 2)
    small = word_ball(gens, max_word_len)
    n_small = _census_count(small, T, I, J)
    n_big = _census_count(big, T, I, J)
    if n_small != n_big:
        raise BallNotSaturated(
            f"census grows from {n_small} to {n_big} between radius {max_word_len} and {max_word_len + 2}"
        )
    lI = max(0.0, I[1] - I[0])
    lJ = max(0.0, J[1] - J[0])
    predicted = lI * lJ / math.pi * T / area
    return n_small, predicted
