"""Farey dissection, major-arc theta-sum approximation and the exact circle identity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import fresnel

from .arith import inverse_table, unit_mask
from .coefficients import CoefficientSequence
from .expsums import TWO_PI, gauss_sums_all, roots_of_unity
from .reports import BoundReport, reduce_records
from .weights import TestFunction


@dataclass(frozen=True)
class FareyArc:
    """Arc around a/q; left and right are offsets from the center."""

    a: int
    q: int
    q_left: int
    q_right: int

    @cached_property
    def left(self) -> Fraction:
        return Fraction(-1, self.q * (self.q + self.q_left))

    @cached_property
    def right(self) -> Fraction:
        return Fraction(1, self.q * (self.q + self.q_right))

    @cached_property
    def center(self) -> Fraction:
        # 1/1 is placed at 0 so the arcs tile [-1/(Q+1), 1 - 1/(Q+1)]
        return Fraction(self.a % self.q, self.q)

    @cached_property
    def interval(self) -> tuple[Fraction, Fraction]:
        return self.center + self.left, self.center + self.right

    @cached_property
    def length(self) -> Fraction:
        return self.right - self.left


def farey_dissection(Q: int) -> list[FareyArc]:
    """Arcs M(a,q) for the Farey fractions of order Q, sorted by position."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    arcs = []
    for q in range(1, Q + 1):
        if q == 1:
            arcs.append(FareyArc(1, 1, Q, Q))
            continue
        inv = inverse_table(q)
        for a in np.flatnonzero(unit_mask(q)):
            ab = int(inv[a])
            ql = Q - ((Q - ab) % q)
            qr = Q - ((Q + ab) % q)
            arcs.append(FareyArc(int(a), q, ql, qr))
    # float keys order distinct fractions of height <= Q correctly; farey_check re-verifies exactly
    arcs.sort(key=lambda arc: (arc.a % arc.q) / arc.q)
    return arcs


def _tree_sum(xs: list[Fraction]) -> Fraction:
    # balanced exact summation keeps intermediate denominators small
    while len(xs) > 1:
        xs = [xs[i] + xs[i + 1] if i + 1 < len(xs) else xs[i] for i in range(0, len(xs), 2)]
    return xs[0] if xs else Fraction(0)


def _endpoints(arc: FareyArc) -> tuple[int, int, int, int]:
    # (num, den) of both ends as plain integers
    a0, q = arc.a % arc.q, arc.q
    dl, dr = q * (q + arc.q_left), q * (q + arc.q_right)
    return a0 * (q + arc.q_left) - 1, dl, a0 * (q + arc.q_right) + 1, dr


def farey_check(arcs: list[FareyArc], Q: int, sum_lengths: bool = False) -> dict:
    """Exact tiling and neighbor-congruence diagnostics.

    Consecutive arcs are checked to share endpoints by integer cross-multiplication,
    so the total measure telescopes exactly to end - start. With sum_lengths the
    lengths are also added up independently in rational arithmetic.
    """
    ends = [_endpoints(arc) for arc in arcs]
    gaps = sum(1 for x, y in zip(ends, ends[1:]) if x[2] * y[1] != y[0] * x[3])
    start = Fraction(ends[0][0], ends[0][1])
    end = Fraction(ends[-1][2], ends[-1][3])
    measure = end - start if gaps == 0 else None
    if sum_lengths or measure is None:
        measure = _tree_sum([arc.length for arc in arcs])
    cong = all(
        (arc.a * arc.q_left - 1) % arc.q == 0
        and (arc.a * arc.q_right + 1) % arc.q == 0
        and Q < arc.q + arc.q_left <= arc.q + Q
        and Q < arc.q + arc.q_right <= arc.q + Q
        for arc in arcs
    )
    return {
        "count": len(arcs),
        "measure": measure,
        "gaps": gaps,
        "start": start,
        "end": end,
        "congruences": cong,
        "ok": measure == 1 and gaps == 0 and start == Fraction(-1, Q + 1) and end == 1 - Fraction(1, Q + 1) and cong,
    }


def psi0(beta: float, X: float) -> complex:
    """int_0^sqrt(X) e(beta x^2) dx."""
    if X < 1:
        raise ValueError("X must be >= 1")
    L = math.sqrt(X)
    z = abs(beta) * X
    if z == 0:
        return complex(L)
    if z < 0.05:
        # sum_k (2 pi i beta)^k X^(k+1/2) / (k! (2k+1))
        w = 2j * math.pi * beta * X
        term, total, k = complex(L), complex(L), 0
        while abs(term) > 1e-18 * L:
            k += 1
            term *= w / k
            total += term / (2 * k + 1)
        return total
    s = math.sqrt(abs(beta))
    S, C = fresnel(2.0 * s * L)
    val = complex(C, S) / (2.0 * s)
    return val if beta > 0 else val.conjugate()


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _oscillatory_integral(freq_quad: float, q: int, bs: np.ndarray, L: float) -> np.ndarray:
    """int_{-L}^{L} e(freq_quad t^2 - b t/q) dt for integer b (composite Gauss-Legendre).

    e(-bt/q) is built as the b-th power of e(-t/q) by running products, one pass
    serving both b and -b.
    """
    B = int(np.max(np.abs(bs))) if len(bs) else 0
    osc = abs(freq_quad) * 2 * L * L + B / q * 2 * L + 1
    panels = int(2 * osc) + 4
    edges = np.linspace(-L, L, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1] - edges[0])
    t = (mid[:, None] + half * _GL_NODES[None, :]).ravel()
    w = np.tile(_GL_WEIGHTS * half, panels)
    base = np.exp(1j * TWO_PI * freq_quad * t * t) * w
    z = np.exp(-1j * TWO_PI * t / q)
    pos = np.empty(B + 1, dtype=complex)
    neg = np.empty(B + 1, dtype=complex)
    cur = np.ones_like(z)
    for k in range(B + 1):
        pos[k] = np.dot(base, cur)
        neg[k] = np.dot(base, cur.conj())
        if k % 64 == 63:
            # refresh from exp to stop the running product from drifting
            cur = np.exp(-1j * TWO_PI * (k + 1) * t / q) * z
        else:
            cur = cur * z
    return np.where(bs >= 0, pos[np.abs(bs)], neg[np.abs(bs)])


def psi_b(b, q: int, beta: float, X: float):
    """Psi(b,q,beta) = (1/q) int_{-sqrt X}^{sqrt X} e(beta t^2 - b t/q) dt; b = 0 gives 2 psi0/q."""
    scalar = np.isscalar(b)
    bs = np.atleast_1d(np.asarray(b, dtype=np.int64))
    L = math.sqrt(X)
    out = np.empty(len(bs), dtype=complex)
    zero = bs == 0
    if zero.any():
        out[zero] = 2.0 * psi0(beta, X) / q
    nz = ~zero
    if nz.any():
        if beta == 0:
            k = bs[nz] / q
            out[nz] = np.sin(TWO_PI * k * L) / (math.pi * k) / q
        else:
            out[nz] = _oscillatory_integral(beta, q, bs[nz], L) / q
    return complex(out[0]) if scalar else out


def b_range(q: int) -> np.ndarray:
    """Integers b with -3q/2 < b <= 3q/2."""
    lo = 1 - (3 * q + 1) // 2
    return np.arange(lo, (3 * q) // 2 + 1, dtype=np.int64)


def order_Q(X: float) -> int:
    return int(math.floor(5 * math.sqrt(X)))


def F_at(a: int, q: int, beta: float, X: float) -> complex:
    """F(a/q + beta) with the rational part of the phase reduced exactly."""
    M = math.isqrt(int(math.floor(X)))
    m = np.arange(1, M + 1, dtype=np.int64)
    z = roots_of_unity(q)[(a % q) * (m * m % q) % q] * np.exp(1j * TWO_PI * beta * (m * m).astype(float))
    return complex(1.0 + 2.0 * np.sum(z))


def _check_major(a: int, q: int, beta: float, X: float) -> int:
    Q = order_Q(X)
    if q < 1 or q > Q or math.gcd(a, q) != 1:
        raise ValueError(f"need gcd(a,q) = 1 and 1 <= q <= Q = {Q}")
    if abs(beta) > 1.0 / (q * Q) * (1 + 1e-12):
        raise ValueError(f"|beta| must be <= 1/(qQ) = {1.0 / (q * Q)}")
    return Q


def decomposition_terms(a: int, q: int, beta: float, X: float) -> dict:
    _check_major(a, q, beta, X)
    G0 = gauss_sums_all(0, q)[a % q]
    main = 2.0 * G0 / q * psi0(beta, X)
    bs = b_range(q)
    bs = bs[bs != 0]
    G = np.array([gauss_sums_all(int(b), q)[a % q] for b in bs]) if len(bs) else np.zeros(0)
    psi = psi_b(bs, q, beta, X) if len(bs) else np.zeros(0, dtype=complex)
    F = F_at(a, q, beta, X)
    return {"F": F, "main": main, "b_sum": complex(np.sum(G * psi)), "sum_abs_psi": float(np.sum(np.abs(psi)))}


def decomposition_residual(a: int, q: int, beta: float, X: float) -> float:
    """|F(a/q+beta) - 2G(a,0;q)psi0(beta)/q - sum_{b != 0} G(a,b;q) Psi(b,q,beta)|."""
    t = decomposition_terms(a, q, beta, X)
    return abs(t["F"] - t["main"] - t["b_sum"])


def sum_abs_psi(q: int, beta: float, X: float) -> float:
    bs = b_range(q)
    bs = bs[bs != 0]
    return float(np.sum(np.abs(psi_b(bs, q, beta, X)))) if len(bs) else 0.0


def decomposition_items(X: float, samples: int, seed: int) -> list[tuple[int, int, float]]:
    rng = np.random.default_rng(seed)
    Q = order_Q(X)
    out = []
    while len(out) < samples:
        q = int(rng.integers(1, Q + 1))
        a = int(rng.integers(1, q + 1))
        if math.gcd(a, q) != 1:
            continue
        u = rng.random()
        # a fifth of the samples sit on an arc endpoint
        beta = (1.0 if u < 0.1 else -1.0 if u < 0.2 else rng.uniform(-1, 1)) / (q * Q)
        out.append((a, q, float(beta)))
    return out


def decomposition_sweep(X: float = 1e4, samples: int = 200, seed: int = 1) -> tuple[BoundReport, BoundReport]:
    """(residual / log(q+2), sum_b |Psi| / log(q+2)) maxima over a seeded (a, q, beta) sample."""
    r1, r2 = [], []
    for a, q, beta in decomposition_items(X, samples, seed):
        t = decomposition_terms(a, q, beta, X)
        res = abs(t["F"] - t["main"] - t["b_sum"])
        lg = math.log(q + 2)
        prm = {"a": a, "q": q, "beta": beta, "X": X}
        r1.append({"params": prm, "value": res, "bound": lg, "ratio": res / lg})
        r2.append({"params": prm, "value": t["sum_abs_psi"], "bound": lg, "ratio": t["sum_abs_psi"] / lg})
    return reduce_records(r1, "residual / log(q+2)"), reduce_records(r2, "sum_b |Psi(b,q,beta)| / log(q+2)")


def psi0_envelope_sweep(X_list=(1e2, 1e3, 1e4, 1e5), n_beta: int = 60) -> BoundReport:
    """max |psi0(beta)| / (X/(1+|beta|X))^(1/2) over a log grid of beta."""
    recs = []
    for X in X_list:
        for beta in np.concatenate([[0.0], np.logspace(-8, 1, n_beta) / 1.0]):
            for sgn in (1.0, -1.0):
                v = abs(psi0(sgn * beta, X))
                env = math.sqrt(X / (1 + abs(beta) * X))
                recs.append({"params": {"X": X, "beta": sgn * beta}, "value": v, "bound": env, "ratio": v / env})
    return reduce_records(recs, "|psi0| / (X/(1+|beta|X))^(1/2)")


# ------------------------------------------------------------ exact identity


@lru_cache(maxsize=8)
def _F_cubed_samples(X: int, N: int) -> np.ndarray:
    M = math.isqrt(X)
    sq = np.arange(1, M + 1, dtype=np.int64) ** 2
    r = roots_of_unity(N)
    out = np.empty(N, dtype=complex)
    block = max(1, 4_000_000 // max(M, 1))
    for s in range(0, N, block):
        j = np.arange(s, min(N, s + block), dtype=np.int64)
        F = 1.0 + 2.0 * r[np.outer(j, sq) % N].sum(axis=1)
        out[s : s + len(j)] = F**3
    out.flags.writeable = False
    return out


def convolution_via_circle(
    X: int, h: int, A: CoefficientSequence, phi: TestFunction | None = None, N: int | None = None
) -> complex:
    """int_0^1 F(alpha)^3 G(alpha) d alpha as an exact average over N >= 4X+2 points."""
    phi = phi or TestFunction()
    if X < 2 or int(X) != X:
        raise ValueError("X must be an integer >= 2")
    X = int(X)
    if N is None:
        N = 4 * X + 2
    if N < 4 * X + 2:
        raise ValueError(f"N = {N} is below the bandwidth bound 4X+2 = {4 * X + 2}")
    lo, hi = math.ceil(X / 2), X
    n = np.arange(lo, hi + 1, dtype=np.int64)
    w = A.window(lo + h, hi + h) * phi(n / X)
    keep = w != 0
    n, w = n[keep], w[keep]
    F3 = _F_cubed_samples(X, N)
    r = roots_of_unity(N)
    acc = np.empty(N, dtype=complex)
    block = max(1, 4_000_000 // max(len(n), 1))
    for s in range(0, N, block):
        j = np.arange(s, min(N, s + block), dtype=np.int64)
        G = r[(-np.outer(j, n)) % N] @ w
        acc[s : s + len(j)] = F3[s : s + len(j)] * G
    return complex(np.sum(acc) / N)
