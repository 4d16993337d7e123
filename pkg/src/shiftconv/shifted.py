"""Shifted convolution sums against r_3 and the tau_3 main term."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import fresnel

from .arith import divisors, mobius, tau, totient
from .coefficients import CoefficientSequence, builtin
from .constants import EULER_GAMMA, STIELTJES_GAMMA1
from .expsums import gauss_sums_all, r_ell_batch, roots_of_unity
from .weights import TestFunction, chirp_dft

# weights on C_2 I_0, C_1 I_1, C_0 I_2. "literal" is the (4, 4, 2) form; the
# "corrected" one is twice that, which is what the sums themselves follow.
MAINTERM_WEIGHTS = {"literal": (4.0, 4.0, 2.0), "corrected": (8.0, 8.0, 4.0)}
Q_TRUNC = 10_000
TAIL_EXPONENT = 1.5
BETA_TAIL = 1e-6


def direct_sum(X: int, h: int, A: CoefficientSequence, phi: TestFunction | None = None) -> float:
    """sum_n A(n+h) r_3(n) phi(n/X), exactly over the support [X/2, X]."""
    phi = phi or TestFunction()
    X = int(X)
    if X < 1:
        raise ValueError("X must be a positive integer")
    lo, hi = math.ceil(X / 2), X
    A.require(lo + h, hi + h)
    r3 = r_ell_batch(hi, 3)
    n = np.arange(lo, hi + 1)
    w = phi(n / X)
    a = A.window(lo + h, hi + h)
    val = np.sum(a * r3[lo:] * w)
    return complex(val) if np.iscomplexobj(val) else float(val)


# -- the constants C_l(h) ------------------------------------------------------


def _powmod(a: np.ndarray, e: int, q: int) -> np.ndarray:
    r = np.ones_like(a)
    b = a % q
    while e:
        if e & 1:
            r = r * b % q
        b = b * b % q
        e >>= 1
    return r


def _ramanujan_all(c: int) -> np.ndarray:
    """S(m, 0; c) = sum over units x mod c of e(mx/c), for every m mod c."""
    x = np.arange(c)
    u = (np.gcd(x, c) == 1).astype(float)
    return (np.fft.ifft(u) * c).real if c > 1 else np.ones(1)


def P_ell(ell: int, n: int, q: int) -> float:
    """The polynomials in log n, log q attached to C_0, C_1, C_2."""
    if ell == 0:
        return 1.0
    g, g1 = EULER_GAMMA, STIELTJES_GAMMA1
    ln, lq = math.log(n), math.log(q)
    ds = [math.log(d) for d in divisors(n)]
    t = len(ds)
    s1 = math.fsum(ds)
    if ell == 1:
        return 5.0 / 3.0 * ln - 3.0 * lq + 3.0 * g - s1 / (3.0 * t)
    if ell == 2:
        s2 = math.fsum(v * v for v in ds)
        return (ln * ln - 5.0 * lq * ln + 4.5 * lq * lq + 3.0 * g * g - 3.0 * g1 + 7.0 * g * ln
                - 9.0 * g * lq + ((ln + lq - 5.0 * g) * s1 - 1.5 * s2) / t)
    raise ValueError("ell must be 0, 1 or 2")


def constant_terms_at(h: int, q: int) -> np.ndarray:
    """The q-th term of C_0, C_1, C_2 (complex; the imaginary parts cancel).

    Every piece is evaluated directly: G(a,0;q)^3 for each unit a, and the
    Ramanujan-type sum S(-a^{-1}, 0; q/n) indexed at the actual inverse.
    """
    a = np.arange(q, dtype=np.int64)
    units = np.gcd(a, q) == 1
    a = a[units]
    G = gauss_sums_all(0, q)[units] if q > 1 else np.ones(1, dtype=complex)
    E = roots_of_unity(q)[(a * (h % q)) % q] * G**3
    abar = _powmod(a, totient(q) - 1, q) if q > 1 else a
    out = np.zeros(3, dtype=complex)
    for n in divisors(q):
        c = q // n
        R = _ramanujan_all(c)
        W = np.dot(E, R[(-abar) % c])
        if W == 0:
            continue
        f = n * tau(n) * W
        out += f * np.array([P_ell(l, n, q) for l in range(3)])
    return out / float(q) ** 5


@lru_cache(maxsize=32)
def _constant_series(h: int, q_trunc: int) -> np.ndarray:
    return np.array([constant_terms_at(h, q) for q in range(1, q_trunc + 1)])


@dataclass
class ConstantValue:
    value: float
    tail_estimate: float
    imag_residue: float
    even_q_share: float


def _tail(terms: np.ndarray, ell: int) -> float:
    """Majorant tail: A sum_{q>Q} q^(-3/2) (1 + log q)^(ell+2), A fitted on (Q/2, Q].

    |G(a,0;q)|^3 <= (2q)^(3/2) and the divisor sum contribute q^(-3/2) up to
    logarithms; the constant is taken from the largest scaled term observed.
    """
    Q = len(terms)
    q = np.arange(Q // 2 + 1, Q + 1)
    pw = ell + 2
    scaled = np.abs(terms[q - 1]) * q**TAIL_EXPONENT / (1.0 + np.log(q)) ** pw
    A = float(scaled.max())
    val, _ = quad(lambda x: x ** (-TAIL_EXPONENT) * (1.0 + math.log(x)) ** pw, Q + 0.5, np.inf, limit=200)
    return A * val


def mainterm_constants_detail(h: int, ell: int, q_trunc: int = Q_TRUNC) -> ConstantValue:
    if ell not in (0, 1, 2):
        raise ValueError("ell must be 0, 1 or 2")
    if q_trunc < 1:
        raise ValueError("q_trunc must be positive")
    terms = _constant_series(int(h), int(q_trunc))[:, ell]
    total = terms.sum()
    even = float(np.abs(terms[1::2]).sum() / max(np.abs(terms).sum(), 1e-300))
    return ConstantValue(float(total.real), _tail(terms, ell), float(abs(total.imag)), even)


def mainterm_constants(h: int, ell: int, q_trunc: int = Q_TRUNC) -> tuple[float, float]:
    """(C_ell(h) truncated at q <= q_trunc, tail estimate)."""
    if q_trunc < 100:
        raise ValueError("q_trunc must be at least 100")
    c = mainterm_constants_detail(h, ell, q_trunc)
    return c.value, c.tail_estimate


# -- the integrals I_l(X, h, phi) ----------------------------------------------


def cubic_theta_factor(b) -> np.ndarray:
    """(int_0^1 e(b v^2) dv)^3 for real b (b = beta X)."""
    b = np.atleast_1d(np.asarray(b, dtype=float))
    out = np.ones(b.shape, dtype=complex)
    small = np.abs(b) < 1e-3
    bs = b[small]
    w = 2j * math.pi * bs
    # 1 + w/3 + w^2/10 + w^3/42 + w^4/216
    out[small] = 1 + w / 3 + w**2 / 10 + w**3 / 42 + w**4 / 216
    big = ~small
    s = np.sqrt(np.abs(b[big]))
    S, C = fresnel(2.0 * s)
    V = (C + 1j * np.sign(b[big]) * S) / (2.0 * s)
    out[big] = V
    return out**3


def _weight_profile(X: float, h: float, ell: int, phi: TestFunction, m: int = 4001):
    lo, hi = phi.support
    w = np.linspace(lo, hi, m)
    f = phi(w) * np.log(X * w + h) ** ell
    return w, f


def _second_derivative_mass(X, h, ell, phi) -> float:
    """int |d^2/dw^2 (phi(w) log(Xw+h)^ell)| dw."""
    lo, hi = phi.support
    w = np.linspace(lo, hi, 8001)[1:-1]
    L = np.log(X * w + h)
    d1 = X / (X * w + h)
    d2 = -d1 * d1
    p0, p1, p2 = phi(w), phi.derivative(w, 1), phi.derivative(w, 2)
    if ell == 0:
        g = p2
    elif ell == 1:
        g = p2 * L + 2 * p1 * d1 + p0 * d2
    else:
        g = p2 * L * L + 4 * p1 * L * d1 + p0 * (2 * d1 * d1 + 2 * L * d2)
    return float(np.trapezoid(np.abs(g), w))


def beta_tail_bound(B: float, X: float, h: float, ell: int, phi: TestFunction) -> float:
    """|int_{|b|>B}| via two integrations by parts in w and |int_0^1 e(bv^2)dv| <= 1/(2 sqrt b).

    Returns 2 K/(2 pi)^2 int_B^inf b^-2 (2 sqrt b)^-3 db = K B^(-5/2) / (40 pi^2).
    """
    K = _second_derivative_mass(X, h, ell, phi)
    return K * B**-2.5 / (40.0 * math.pi**2)


@dataclass
class IntegralValue:
    value: float
    error_estimate: float
    B: float
    db: float
    tail_bound: float
    step_change: float
    imag_residue: float


def _beta_quadrature(X, h, ell, phi, B, db, m=4001):
    w, f = _weight_profile(X, h, ell, phi, m)
    dw = w[1] - w[0]
    n = 2 * int(math.ceil(B / db)) + 1
    b0 = -(n // 2) * db
    # U(b) = int f(w) e(-b w) dw on the grid b0 + j db
    x = f * dw * np.exp(-2j * math.pi * b0 * w)
    U = np.exp(-2j * math.pi * np.arange(n) * db * w[0]) * chirp_dft(x, n, 2 * math.pi * db * dw)
    b = b0 + np.arange(n) * db
    g = U * cubic_theta_factor(b)
    # smooth and decaying at both ends: plain trapezoid
    val = np.sum(g) * db - 0.5 * (g[0] + g[-1]) * db
    return complex(val)


def mainterm_integrals_detail(X: float, h: float, ell: int, phi: TestFunction | None = None,
                              tol: float = BETA_TAIL, db: float = 0.02) -> IntegralValue:
    """I_ell = int (int phi(u/X) e(-beta u) log(u+h)^ell du) (int_0^1 e(beta X v^2) dv)^3 dbeta.

    With b = beta X the X-dependence moves into the logarithm. The b-range is cut
    where the two-fold integration-by-parts envelope drops below tol.
    """
    phi = phi or TestFunction()
    if X < 2:
        raise ValueError("X must be at least 2")
    if ell not in (0, 1, 2):
        raise ValueError("ell must be 0, 1 or 2")
    K = _second_derivative_mass(X, h, ell, phi)
    B = max(50.0, (K / (40.0 * math.pi**2 * tol)) ** 0.4)
    if B > 1e6:
        raise RuntimeError(f"beta truncation needs B = {B:.3g}, beyond the quadrature budget")
    v1 = _beta_quadrature(X, h, ell, phi, B, db)
    v2 = _beta_quadrature(X, h, ell, phi, B, 2 * db)
    tail = beta_tail_bound(B, X, h, ell, phi)
    return IntegralValue(float(v1.real), tail + abs(v1 - v2), B, db, tail, abs(v1 - v2), abs(v1.imag))


def mainterm_integrals(X: float, h: float, ell: int, phi: TestFunction | None = None) -> tuple[float, float]:
    d = mainterm_integrals_detail(X, h, ell, phi)
    return d.value, d.error_estimate


def mainterm_integral_closed(X: float, h: float, ell: int, phi: TestFunction | None = None) -> float:
    """The beta-integral collapses to (pi/4) int phi(w) w^(1/2) log(Xw+h)^ell dw.

    Integrating e(beta(X|v|^2 - u)) over beta leaves u = X|v|^2, and |v|^2 on the
    positive octant has density (pi/4) t^(1/2).
    """
    phi = phi or TestFunction()
    w, f = _weight_profile(X, h, ell, phi, 8001)
    return float(math.pi / 4 * np.trapezoid(f * np.sqrt(w), w))


# -- drivers ---------------------------------------------------------------------


@dataclass
class MainTermReport:
    X: int
    h: int
    S_direct: float
    main_term: float
    constants: list[float]
    constant_tails: list[float]
    integrals: list[float]
    integral_errors: list[float]
    relative_error: float
    reading: str = "corrected"
    main_term_literal: float = 0.0
    even_q_share: float = 0.0
    notes: dict = field(default_factory=dict)


def main_term(C, I, X: float, reading: str = "corrected") -> float:
    a, b, c = MAINTERM_WEIGHTS[reading]
    return (a * C[2] * I[0] + b * C[1] * I[1] + c * C[0] * I[2]) * X**1.5


def tau3_mainterm_compare(X_list, h: int, phi: TestFunction | None = None, q_trunc: int = Q_TRUNC,
                          reading: str = "corrected", h_of_X=None) -> list[MainTermReport]:
    """Direct tau_3-weighted sums against the main term, one report per X.

    h_of_X, if given, maps X to the shift (for h proportional to X); otherwise h is fixed.
    """
    phi = phi or TestFunction()
    X_list = [int(X) for X in X_list]
    for X in X_list:
        if X > 2**18:
            raise ValueError("X beyond desk scale (2^18)")
    shifts = {X: int(h_of_X(X)) if h_of_X else int(h) for X in X_list}
    A = builtin("tau3", max(X + shifts[X] for X in X_list) + 1)
    reports = []
    for X in sorted(X_list):
        hh = shifts[X]
        cs = [mainterm_constants_detail(hh, l, q_trunc) for l in range(3)]
        C = [c.value for c in cs]
        ints = [mainterm_integrals_detail(X, hh, l, phi) for l in range(3)]
        I = [v.value for v in ints]
        S = float(direct_sum(X, hh, A, phi))
        M = main_term(C, I, X, reading)
        reports.append(MainTermReport(
            X, hh, S, M, C, [c.tail_estimate for c in cs], I, [v.error_estimate for v in ints],
            abs(S - M) / max(abs(S), 1.0), reading, main_term(C, I, X, "literal"),
            max(c.even_q_share for c in cs),
        ))
    return reports


def relative_error_slope(reports: list[MainTermReport]) -> float:
    x = np.log([r.X for r in reports])
    y = np.log([max(r.relative_error, 1e-300) for r in reports])
    return float(np.polyfit(x, y, 1)[0])


def lattice_count(X: int) -> int:
    """#{(a,b,c) in Z^3 : a^2+b^2+c^2 <= X}."""
    X = int(X)
    if X < 0:
        return 0
    M = math.isqrt(X)
    total = 0
    y = np.arange(-M, M + 1, dtype=np.int64)
    for x in range(-M, M + 1):
        rem = X - x * x - y * y
        rem = rem[rem >= 0]
        r = np.floor(np.sqrt(rem.astype(float))).astype(np.int64)
        # guard the float square root
        r -= (r * r > rem)
        r += ((r + 1) * (r + 1) <= rem)
        total += int(np.sum(2 * r + 1))
    return total


def sphere_count_check(X: int) -> tuple[int, float, float]:
    """(sum_{n<=X} r_3(n), (4 pi/3) X^(3/2), log|lhs - rhs| / log X)."""
    X = int(X)
    if not 1 <= X <= 10**8:
        raise ValueError("X must be in [1, 1e8]")
    lhs = lattice_count(X)
    rhs = 4.0 * math.pi / 3.0 * X**1.5
    diff = abs(lhs - rhs)
    expo = math.log(diff) / math.log(X) if X > 1 and diff > 0 else float("nan")
    return lhs, rhs, expo


@dataclass
class TrendFit:
    slope: float
    intercept: float
    residuals: list[float]
    values: list[float]
    X: list[int]


def exponent_trend(X_list, h: int, A: CoefficientSequence, phi: TestFunction | None = None) -> TrendFit:
    """Least-squares slope of log|S_h(X)| against log X."""
    X_list = sorted(int(X) for X in X_list)
    vals = [direct_sum(X, h, A, phi) for X in X_list]
    mags = np.abs(np.array(vals, dtype=complex))
    if np.all(mags == 0):
        raise ValueError("degenerate fit: every sum vanished")
    keep = mags > 0
    if keep.sum() < 2:
        raise ValueError("degenerate fit: fewer than two nonzero sums")
    x = np.log(np.array(X_list, dtype=float)[keep])
    y = np.log(mags[keep])
    slope, icpt = np.polyfit(x, y, 1)
    res = y - (slope * x + icpt)
    return TrendFit(float(slope), float(icpt), res.tolist(), [float(abs(v)) for v in vals], X_list)
