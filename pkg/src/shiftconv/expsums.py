"""Complete exponential sums and theta-type generating sums.

All phases are reduced as integers modulo the denominator before a root of
unity is looked up, so the only rounding comes from the table entries and the
final (pairwise) summation.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import epsilon_q, inverse_table, is_prime, jacobi_symbol, unit_mask
from .coefficients import CoefficientSequence
from .weights import TestFunction

TWO_PI = 2.0 * math.pi
MEMORY_BUDGET = 10**8


def e(t) -> complex:
    """exp(2 pi i t); exact rational phases are reduced before exponentiating."""
    if isinstance(t, (Fraction, int)):
        t = Fraction(t)
        r = Fraction(t.numerator % t.denominator, t.denominator)
        return complex(np.exp(1j * TWO_PI * float(r)))
    r = math.fmod(t, 1.0)
    return complex(math.cos(TWO_PI * r), math.sin(TWO_PI * r))


@lru_cache(maxsize=32)
def roots_of_unity(q: int) -> np.ndarray:
    """exp(2 pi i k / q) for 0 <= k < q, using symmetry to keep arguments small."""
    k = np.arange(q)
    k = np.where(2 * k > q, k - q, k)
    z = np.exp(1j * TWO_PI * k / q)
    z.flags.writeable = False
    return z


def gauss_sum_direct(a: int, b: int, q: int) -> complex:
    """G(a,b;q) = sum_{x mod q} e((a x^2 + b x)/q), term by term."""
    if q < 1:
        raise ValueError("q must be positive")
    x = np.arange(q, dtype=np.int64)
    ph = ((a % q) * (x * x % q) + (b % q) * x) % q
    return complex(np.sum(roots_of_unity(q)[ph]))


def _gauss_odd(a: int, b: int, m: int) -> complex:
    # e(-4bar abar b^2/m) (a/m) eps_m sqrt(m), valid for odd m, gcd(a,m) = 1
    if m == 1:
        return 1 + 0j
    ph = -pow(4, -1, m) * pow(a, -1, m) * b * b % m
    return complex(roots_of_unity(m)[ph]) * jacobi_symbol(a, m) * epsilon_q(m) * math.sqrt(m)


def gauss_sum_fast(a: int, b: int, q: int) -> complex:
    """G(a,b;q) via the CRT splitting into a 2-power part and an odd part."""
    if q < 1:
        raise ValueError("q must be positive")
    if math.gcd(a, q) != 1:
        raise ValueError(f"gauss_sum_fast needs gcd(a,q) = 1, got a={a}, q={q}")
    k = (q & -q).bit_length() - 1
    two, m = 1 << k, q >> k
    even = gauss_sum_direct(a * m, b, two) if two > 1 else 1 + 0j
    return even * _gauss_odd(a * two, b, m)


def gauss_sum_direct_grid(q: int) -> np.ndarray:
    """G[a, b] = G(a,b;q) for all a, b mod q, summed term by term.

    The x-sum is a matrix product of the exact-phase tables e(a x^2/q) and e(b x/q).
    """
    x = np.arange(q, dtype=np.int64)
    r = roots_of_unity(q)
    quad = r[np.outer(x, x * x % q) % q]
    lin = r[np.outer(x, x) % q]
    return quad @ lin


def gauss_sum_fast_grid(q: int) -> tuple[np.ndarray, np.ndarray]:
    """(units a, G[i, b] = G(a_i,b;q)) from the CRT splitting and the odd closed form."""
    a = np.flatnonzero(unit_mask(q)).astype(np.int64)
    b = np.arange(q, dtype=np.int64)
    k = (q & -q).bit_length() - 1
    two, m = 1 << k, q >> k
    out = np.ones((len(a), q), dtype=complex)
    if two > 1:
        g2 = gauss_sum_direct_grid(two)
        out *= g2[np.ix_((a * m) % two, b % two)]
    if m > 1:
        A = (a * two) % m
        inv = inverse_table(m)[A]
        jac = np.array([jacobi_symbol(int(v), m) for v in A])
        ph = (-pow(4, -1, m) * inv[:, None] % m) * (b * b % m)[None, :] % m
        out *= roots_of_unity(m)[ph] * (jac * epsilon_q(m) * math.sqrt(m))[:, None]
    return a, out


def gauss_sums_all(b: int, q: int) -> np.ndarray:
    """G(a,b;q) for every a mod q at once.

    G(.,b;q) is the discrete Fourier transform of w_r = sum_{x^2 = r} e(bx/q).
    """
    x = np.arange(q, dtype=np.int64)
    idx = x * x % q
    z = roots_of_unity(q)[(b % q) * x % q]
    w = np.bincount(idx, z.real, minlength=q) + 1j * np.bincount(idx, z.imag, minlength=q)
    return np.fft.ifft(w) * q


def kloosterman(m: int, n: int, c: int) -> complex:
    """S(m,n;c) = sum over units x mod c of e((m x + n xbar)/c)."""
    if c < 1:
        raise ValueError("c must be positive")
    if c == 1:
        return 1 + 0j
    x = np.flatnonzero(unit_mask(c))
    ph = ((m % c) * x + (n % c) * inverse_table(c)[x]) % c
    return complex(np.sum(roots_of_unity(c)[ph]))


def kloosterman_all_m(n: int, c: int) -> np.ndarray:
    """S(m,n;c) for every m mod c (DFT of the unit-supported vector e(n xbar/c))."""
    if c == 1:
        return np.ones(1, dtype=complex)
    v = np.zeros(c, dtype=complex)
    u = unit_mask(c)
    v[u] = roots_of_unity(c)[(n % c) * inverse_table(c)[u] % c]
    return np.fft.ifft(v) * c


@lru_cache(maxsize=64)
def legendre_table(p: int) -> np.ndarray:
    """(x/p) for 0 <= x < p, p an odd prime."""
    t = -np.ones(p, dtype=np.int64)
    x = np.arange(1, p, dtype=np.int64)
    t[np.unique(x * x % p)] = 1
    t[0] = 0
    t.flags.writeable = False
    return t


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")


def salie(m: int, n: int, p: int) -> complex:
    """sum over units x mod p of (x/p) e((m x + n xbar)/p)."""
    _check_odd_prime(p)
    x = np.arange(1, p, dtype=np.int64)
    ph = ((m % p) * x + (n % p) * inverse_table(p)[x]) % p
    return complex(np.sum(legendre_table(p)[x] * roots_of_unity(p)[ph]))


def r_ell(n: int, ell: int) -> int:
    """Number of integer ell-tuples with squares summing to n (recursive enumeration)."""
    if n < 0:
        return 0
    if ell < 1 or ell > 8:
        raise ValueError("ell must be in [1, 8]")
    return _r_ell(n, ell)


@lru_cache(maxsize=None)
def _r_ell(n: int, ell: int) -> int:
    if ell == 0:
        return 1 if n == 0 else 0
    if ell == 1:
        r = math.isqrt(n)
        return (1 if n == 0 else 2) if r * r == n else 0
    total = _r_ell(n, ell - 1)
    m = 1
    while m * m <= n:
        total += 2 * _r_ell(n - m * m, ell - 1)
        m += 1
    return total


def r_ell_batch(X: int, ell: int) -> np.ndarray:
    """r_ell(n) for 0 <= n <= X by repeated convolution with the squares indicator."""
    if X < 0 or ell < 1:
        raise ValueError("need X >= 0 and ell >= 1")
    if ell * (X + 1) > MEMORY_BUDGET:
        raise MemoryError(f"r_ell_batch table {ell}x{X + 1} exceeds budget {MEMORY_BUDGET}")
    M = math.isqrt(X)
    sq = np.arange(M + 1, dtype=np.int64) ** 2
    r = np.zeros(X + 1, dtype=np.int64)
    r[0] = 1
    for _ in range(ell):
        s = r.copy()
        for k in sq[1:]:
            s[k:] += 2 * r[: X + 1 - k]
        r = s
    return r


def F_alpha(alpha, X: float) -> complex:
    """sum_{|m| <= sqrt(X)} e(alpha m^2); exact phase reduction for Fraction alpha."""
    if X < 1:
        raise ValueError("X must be >= 1")
    M = math.isqrt(int(math.floor(X)))
    m = np.arange(1, M + 1, dtype=np.int64)
    if isinstance(alpha, Fraction):
        d = alpha.denominator
        ph = (alpha.numerator % d) * (m * m % d) % d
        if d <= 10**7:
            z = roots_of_unity(d)[ph]
        else:
            z = np.exp(1j * TWO_PI * (ph / d))
    else:
        a = math.fmod(float(alpha), 1.0)
        z = np.exp(1j * TWO_PI * np.fmod(a * (m * m).astype(float), 1.0))
    return complex(1.0 + 2.0 * np.sum(z))


def G_alpha(alpha, X: float, h: int, A: CoefficientSequence, phi: TestFunction | None = None) -> complex:
    """sum_{X/2 <= n <= X} A(n+h) e(-alpha n) phi(n/X)."""
    phi = phi or TestFunction()
    lo, hi = math.ceil(X / 2), math.floor(X)
    n = np.arange(lo, hi + 1, dtype=np.int64)
    a = A.window(lo + h, hi + h)
    w = a * phi(n / X)
    if isinstance(alpha, Fraction):
        d = alpha.denominator
        z = roots_of_unity(d)[(-alpha.numerator % d) * (n % d) % d] if d <= 10**7 else np.exp(
            -1j * TWO_PI * ((alpha.numerator * n) % d) / d
        )
    else:
        al = math.fmod(float(alpha), 1.0)
        z = np.exp(-1j * TWO_PI * np.fmod(al * n.astype(float), 1.0))
    return complex(np.sum(w * z))
