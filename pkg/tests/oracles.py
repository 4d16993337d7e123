"""Slow, independent reference implementations used only by the tests.

Everything here is written from the definitions with plain Python loops and
cmath, sharing no code with the package.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from itertools import product


def e(t: float) -> complex:
    return cmath.exp(2j * math.pi * t)


def gauss(a: int, b: int, q: int) -> complex:
    return sum(e(((a * x * x + b * x) % q) / q) for x in range(q))


def inverse(a: int, q: int) -> int:
    for x in range(1, q):
        if a * x % q == 1:
            return x
    raise ValueError


def units(q: int) -> list[int]:
    return [x for x in range(q) if math.gcd(x, q) == 1] if q > 1 else [0]


def kloosterman(m: int, n: int, c: int) -> complex:
    if c == 1:
        return 1 + 0j
    return sum(e(((m * x + n * inverse(x, c)) % c) / c) for x in units(c))


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if any(x * x % p == a for x in range(1, p)) else -1


def salie(m: int, n: int, p: int) -> complex:
    return sum(legendre(x, p) * e(((m * x + n * inverse(x, p)) % p) / p) for x in range(1, p))


def r3(n: int) -> int:
    M = math.isqrt(n)
    return sum(1 for x, y, z in product(range(-M, M + 1), repeat=3) if x * x + y * y + z * z == n)


def divisor_count(n: int) -> int:
    return sum(1 for d in range(1, n + 1) if n % d == 0)


def tau3(n: int) -> int:
    return sum(1 for a in range(1, n + 1) if n % a == 0 for b in range(1, n // a + 1) if (n // a) % b == 0)


def char_sum(b1, b2, b3, n1, n2, h, v, q) -> complex:
    """C summed with a descending a-loop (order reversed relative to any vectorized sum)."""
    total = 0j
    c = q // n1
    for a in sorted(units(q), reverse=True):
        ab = inverse(a, q) if q > 1 else 0
        term = e(((a * h - ab * v) % q) / q)
        for b in (b1, b2, b3):
            term *= gauss(a, b, q)
        term *= kloosterman(-ab, n2, c)
        total += term
    return total


def T_tilde_opened(p, r1h, w, r2, r3n2) -> complex:
    """The reduced sum with the Kloosterman sum opened into a double loop over (x, y)."""
    total = 0j
    for x in range(1, p):
        xb = inverse(x, p)
        for y in range(1, p):
            yb = inverse(y, p)
            total += legendre(x, p) * e(((r1h * x - w * xb - r2 * xb * y + r3n2 * yb) % p) / p)
    return total


def farey_neighbors(Q: int) -> list[Fraction]:
    fr = sorted({Fraction(a, q) for q in range(1, Q + 1) for a in range(0, q + 1)})
    return fr
