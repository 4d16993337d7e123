"""Integer and modular arithmetic primitives.

Factorization, inverses, Jacobi symbols, CRT splitting, divisor functions
and the four-way modulus split (q1, q2, q3', q3'') used by the character
sum machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TRIAL_LIMIT = 10**6
MAX_INPUT = 2**63


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError("primes must increase and exponents be >= 1")
            last = p
            prod *= p**e
        if prod != self.value:
            raise ValueError("factor product does not match value")

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def exponent(self, p: int) -> int:
        return self.as_dict().get(p, 0)


# Miller-Rabin with these bases is deterministic below 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite n (deterministic seeds)."""
    for c in range(1, 200):
        y, r, q, g = 2, 1, 1, 1
        m = 128
        x = ys = y
        f = lambda v: (v * v + c) % n  # noqa: E731
        while g == 1:
            x = y
            for _ in range(r):
                y = f(y)
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = f(y)
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = f(ys)
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"pollard rho failed on {n}")


def _split_large(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _split_large(d, out)
    _split_large(n // d, out)


def factorize(n: int) -> Factorization:
    if n < 1 or n > MAX_INPUT:
        raise ValueError(f"factorize needs 1 <= n <= 2^63, got {n}")
    out: dict[int, int] = {}
    m = n
    for p in (2, 3):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    p = 5
    step = 2
    while p * p <= m and p <= TRIAL_LIMIT:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += step
        step = 6 - step
    if m > 1:
        if p * p > m:
            out[m] = out.get(m, 0) + 1
        else:
            _split_large(m, out)
    return Factorization(n, tuple(sorted(out.items())))


def inv_mod(a: int, q: int) -> int:
    """Inverse of a modulo q, in [1, q-1]."""
    if q < 2:
        raise ValueError("modulus must be >= 2")
    if math.gcd(a, q) != 1:
        raise ValueError(f"{a} is not invertible mod {q}")
    return pow(a, -1, q)


def _inv(a: int, q: int) -> int:
    # total version for internal use: everything is 0 mod 1
    return 0 if q == 1 else pow(a, -1, q)


def jacobi_symbol(a: int, n: int) -> int:
    if n < 1 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd positive n, got {n}")
    a %= n
    acc = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                acc = -acc
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            acc = -acc
        a %= n
    return acc if n == 1 else 0


def epsilon_q(q: int) -> complex:
    if q < 1 or q % 2 == 0:
        raise ValueError(f"epsilon_q needs odd positive q, got {q}")
    return 1 + 0j if q % 4 == 1 else 1j


def crt_split(a: int, qA: int, qB: int) -> tuple[int, int]:
    """Write a = a1*qB + a2*qA (mod qA*qB)."""
    if qA < 1 or qB < 1 or math.gcd(qA, qB) != 1:
        raise ValueError(f"moduli {qA}, {qB} must be coprime positive integers")
    a1 = a * _inv(qB, qA) % qA if qA > 1 else 0
    a2 = a * _inv(qA, qB) % qB if qB > 1 else 0
    return a1, a2


@dataclass(frozen=True)
class FactorChain:
    q: int
    n1: int
    q1: int
    q2: int
    q3_sf: int
    q3_ff: int

    @property
    def q_prime(self) -> int:
        return self.q1 * self.q2

    @property
    def q3(self) -> int:
        return self.q3_sf * self.q3_ff

    def as_tuple(self) -> tuple[int, int, int, int]:
        return self.q1, self.q2, self.q3_sf, self.q3_ff


def factor_chain(q: int, n1: int) -> FactorChain:
    if q < 1 or n1 < 1:
        raise ValueError("q and n1 must be positive")
    fq = factorize(q)
    fn = factorize(n1).as_dict()
    q1 = q2 = sf = ff = 1
    for p, e in fq.factors:
        f = fn.get(p, 0)
        if e <= f:
            q1 *= p**e
        elif f > 0:
            q2 *= p**e
        elif e == 1 and p != 2:
            sf *= p
        else:
            ff *= p**e
    return FactorChain(q, n1, q1, q2, sf, ff)


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n).factors:
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def tau(n: int) -> int:
    return math.prod(e + 1 for _, e in factorize(n).factors)


def tau3(n: int) -> int:
    return math.prod((e + 1) * (e + 2) // 2 for _, e in factorize(n).factors)


def sum_log_divisors(n: int, power: int = 1) -> float:
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    return math.fsum(math.log(d) ** power for d in divisors(n))


def mobius(n: int) -> int:
    f = factorize(n).factors
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def totient(n: int) -> int:
    r = n
    for p, _ in factorize(n).factors:
        r = r // p * (p - 1)
    return r


@lru_cache(maxsize=64)
def unit_mask(q: int) -> np.ndarray:
    """Boolean array u with u[x] true iff gcd(x, q) = 1, for 0 <= x < q."""
    x = np.arange(q)
    mask = np.gcd(x, q) == 1
    mask.flags.writeable = False
    return mask


@lru_cache(maxsize=64)
def inverse_table(q: int) -> np.ndarray:
    """inv[x] = x^{-1} mod q for units x, 0 elsewhere."""
    inv = np.zeros(q, dtype=np.int64)
    if q == 1:
        return inv
    for x in np.flatnonzero(unit_mask(q)):
        inv[x] = pow(int(x), -1, q)
    inv.flags.writeable = False
    return inv


def tau_k_table(N: int, k: int) -> np.ndarray:
    """tau_k(n) for 0 <= n <= N (tau_k(0) = 0) by repeated Dirichlet convolution with 1."""
    t = np.ones(N + 1, dtype=np.int64)
    t[0] = 0
    for _ in range(k - 1):
        s = np.zeros(N + 1, dtype=np.int64)
        for d in range(1, N + 1):
            s[d::d] += t[d]
        t = s
    return t


def mobius_table(N: int) -> np.ndarray:
    mu = np.ones(N + 1, dtype=np.int64)
    mu[0] = 0
    is_comp = np.zeros(N + 1, dtype=bool)
    for p in range(2, N + 1):
        if is_comp[p]:
            continue
        is_comp[2 * p :: p] = True
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def primes_up_to(N: int) -> list[int]:
    if N < 2:
        return []
    sieve = np.ones(N + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(N) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.flatnonzero(sieve)]
