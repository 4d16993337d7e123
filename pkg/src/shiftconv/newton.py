"""Newton polygons of two-variable Laurent polynomials over F_p and face nondegeneracy."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import is_prime

BRUTE_BUDGET = 4_000_000

Exp = tuple[int, int]


@dataclass(frozen=True)
class LaurentPoly:
    p: int
    terms: tuple[tuple[int, Exp], ...]

    @classmethod
    def from_dict(cls, p: int, d: dict[Exp, int]) -> "LaurentPoly":
        if p < 3 or not is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
        terms = tuple(sorted((c % p, tuple(e)) for e, c in d.items() if c % p))
        return cls(p, tuple((c, e) for c, e in terms))

    @property
    def support(self) -> list[Exp]:
        return [e for _, e in self.terms]

    def coeff(self, e: Exp) -> int:
        for c, f in self.terms:
            if f == e:
                return c
        return 0


def tilde_phase_poly(p: int, r1h: int, w: int, r2: int, r3n2: int) -> LaurentPoly:
    """r1h x - w x^-1 - r2 x^-1 y + r3n2 y^-1, the phase of the opened T~ sum."""
    return LaurentPoly.from_dict(p, {(1, 0): r1h, (-1, 0): -w, (-1, 1): -r2, (0, -1): r3n2})


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list[Exp]:
    """Counterclockwise hull vertices (monotone chain), collinear points dropped."""
    pts = sorted(set(map(tuple, points)))
    if len(pts) <= 2:
        return pts
    lower: list[Exp] = []
    for pt in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    upper: list[Exp] = []
    for pt in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], pt) <= 0:
            upper.pop()
        upper.append(pt)
    return lower[:-1] + upper[:-1]


def newton_polytope(f: LaurentPoly) -> list[Exp]:
    if not f.terms:
        raise ValueError("empty polynomial has no Newton polytope")
    return convex_hull(f.support)


def _on_segment(pt, a, b) -> bool:
    if _cross(a, b, pt) != 0:
        return False
    return min(a[0], b[0]) <= pt[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= pt[1] <= max(a[1], b[1])


def faces_away_from_origin(f: LaurentPoly) -> list[tuple[Exp, ...]]:
    """Vertices and edges of hull(support and 0) that do not contain the origin."""
    hull = convex_hull(list(f.support) + [(0, 0)])
    origin = (0, 0)
    faces: list[tuple[Exp, ...]] = []
    if len(hull) == 1:
        return [] if hull[0] == origin else [tuple(hull)]
    n = len(hull)
    edges = [(hull[i], hull[(i + 1) % n]) for i in range(n)] if n > 2 else [tuple(hull)]
    for v in hull:
        if v != origin:
            faces.append((v,))
    for a, b in edges:
        if not _on_segment(origin, a, b):
            faces.append((a, b))
    return faces


def face_terms(f: LaurentPoly, face: tuple[Exp, ...]) -> list[tuple[int, Exp]]:
    if len(face) == 1:
        return [(c, e) for c, e in f.terms if e == face[0]]
    a, b = face
    return [(c, e) for c, e in f.terms if _on_segment(e, a, b)]


@dataclass
class FaceVerdict:
    face: tuple[Exp, ...]
    terms: list[tuple[int, Exp]]
    nondegenerate: bool
    method: str
    witness: tuple | None = None


@dataclass
class NondegeneracyResult:
    nondegenerate: bool
    faces: list[FaceVerdict] = field(default_factory=list)

    @property
    def field_level(self) -> str:
        """'exact' if every face was settled over the algebraic closure."""
        levels = {fv.method for fv in self.faces}
        if levels <= {"monomial", "binomial"}:
            return "exact"
        return "F_p^2" if "F_p^2" in levels else "F_p"

    @property
    def witness(self):
        for fv in self.faces:
            if not fv.nondegenerate:
                return fv
        return None


def _binomial_degenerate(p: int, t1, t2) -> tuple | None:
    """Torus solution of x df = y df = 0 for c1 m1 + c2 m2.

    With u = c1 m1 and w = c2 m2 the conditions are linear in (u, w); any kernel
    vector with both entries nonzero is realized on the torus over the closure.
    """
    (_, (a1, a2)), (_, (b1, b2)) = t1, t2
    rows = [(a1 % p, b1 % p), (a2 % p, b2 % p)]
    nz = [r for r in rows if any(r)]
    if not nz:
        return (1, 1)
    s_, t_ = nz[0]
    u, w = t_, (-s_) % p
    if all((r[0] * u + r[1] * w) % p == 0 for r in rows) and u and w:
        return (u, w)
    return None


class _Fp2:
    """F_{p^2} = F_p[t]/(t^2 - n) with n a fixed non-residue, vectorized as (a, b) pairs."""

    def __init__(self, p: int):
        self.p = p
        self.n = next(k for k in range(2, p) if pow(k, (p - 1) // 2, p) == p - 1)

    def elements(self):
        a, b = np.meshgrid(np.arange(self.p), np.arange(self.p), indexing="ij")
        a, b = a.ravel(), b.ravel()
        keep = (a != 0) | (b != 0)
        return a[keep].astype(np.int64), b[keep].astype(np.int64)

    def mul(self, x, y):
        p, n = self.p, self.n
        return (x[0] * y[0] + n * (x[1] * y[1] % p)) % p, (x[0] * y[1] + x[1] * y[0]) % p

    def inv(self, x):
        p, n = self.p, self.n
        norm = (x[0] * x[0] - n * (x[1] * x[1] % p)) % p
        ninv = np.array([pow(int(v), -1, p) for v in norm], dtype=np.int64)
        return x[0] * ninv % p, (-x[1]) * ninv % p

    def power(self, x, k: int):
        if k < 0:
            x, k = self.inv(x), -k
        r = (np.ones_like(x[0]), np.zeros_like(x[0]))
        base = x
        while k:
            if k & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            k >>= 1
        return r


def _brute_force(p: int, terms, ext: bool, budget: int) -> tuple | None:
    """Search the torus over F_p (or F_{p^2}) for a common zero of x df/dx, y df/dy."""
    if not ext:
        x = np.arange(1, p, dtype=np.int64)
        pw = {}
        for _, e in terms:
            for k in e:
                if k not in pw:
                    pw[k] = np.array([pow(int(v), k, p) for v in x], dtype=np.int64)
        gx = np.zeros((p - 1, p - 1), dtype=np.int64)
        gy = np.zeros((p - 1, p - 1), dtype=np.int64)
        for c, (ex, ey) in terms:
            mono = np.outer(pw[ex], pw[ey]) % p * c % p
            gx = (gx + ex * mono) % p
            gy = (gy + ey * mono) % p
        hit = np.argwhere((gx == 0) & (gy == 0))
        return (int(x[hit[0][0]]), int(x[hit[0][1]])) if len(hit) else None
    F = _Fp2(p)
    el = F.elements()
    m = len(el[0])
    if m * m > budget:
        raise ValueError("F_p^2 search exceeds budget")
    pw = {}
    for _, e in terms:
        for k in e:
            if k not in pw:
                pw[k] = F.power(el, k)
    gx = [np.zeros((m, m), dtype=np.int64), np.zeros((m, m), dtype=np.int64)]
    gy = [np.zeros((m, m), dtype=np.int64), np.zeros((m, m), dtype=np.int64)]
    for c, (ex, ey) in terms:
        xa, xb = pw[ex]
        ya, yb = pw[ey]
        ra = (np.outer(xa, ya) + F.n * (np.outer(xb, yb) % p)) % p
        rb = (np.outer(xa, yb) + np.outer(xb, ya)) % p
        for g, coef in ((gx, ex), (gy, ey)):
            g[0] = (g[0] + coef * c % p * ra) % p
            g[1] = (g[1] + coef * c % p * rb) % p
    hit = np.argwhere((gx[0] == 0) & (gx[1] == 0) & (gy[0] == 0) & (gy[1] == 0))
    if len(hit):
        i, j = hit[0]
        return ((int(el[0][i]), int(el[1][i])), (int(el[0][j]), int(el[1][j])))
    return None


def nondegenerate_check(f: LaurentPoly, budget: int = BRUTE_BUDGET) -> NondegeneracyResult:
    p = f.p
    if len(f.terms) > 8:
        raise ValueError("support size must be <= 8")
    res = NondegeneracyResult(True)
    for face in faces_away_from_origin(f):
        terms = face_terms(f, face)
        if len(terms) == 1:
            c, (a, b) = terms[0]
            deg = a % p == 0 and b % p == 0
            fv = FaceVerdict(face, terms, not deg, "monomial", (1, 1) if deg else None)
        elif len(terms) == 2:
            wit = _binomial_degenerate(p, terms[0], terms[1])
            fv = FaceVerdict(face, terms, wit is None, "binomial", wit)
        else:
            if (p - 1) ** 2 > budget:
                raise ValueError(f"face with {len(terms)} terms exceeds the brute-force budget at p={p}")
            wit = _brute_force(p, terms, False, budget)
            method = "F_p"
            if wit is None and (p * p - 1) ** 2 <= budget:
                wit = _brute_force(p, terms, True, budget)
                method = "F_p^2"
            fv = FaceVerdict(face, terms, wit is None, method, wit)
        res.faces.append(fv)
        if not fv.nondegenerate:
            res.nondegenerate = False
    return res


def normalized_volume(f: LaurentPoly) -> Fraction:
    """2! times the area of hull(support and 0)."""
    h = convex_hull(list(f.support) + [(0, 0)])
    if len(h) < 3:
        return Fraction(0)
    area2 = sum(h[i][0] * h[(i + 1) % len(h)][1] - h[(i + 1) % len(h)][0] * h[i][1] for i in range(len(h)))
    return Fraction(abs(area2))
