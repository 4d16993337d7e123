"""Euler's constant and the first Stieltjes constant by Euler-Maclaurin summation.

Both are limits of sum_{k<=N} f(k) minus an antiderivative, with f = 1/x and
f = log(x)/x. Summing the first N-1 terms exactly and replacing the tail by
f(N)/2 - sum_j B_2j/(2j)! f^(2j-1)(N) gives an error below 1e-15 at N = 20
with six correction terms.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

EM_N = 20
EM_TERMS = 6


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2."""
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(math.comb(m + 1, k) * B[k] for k in range(m)) / (m + 1))
    return B[n]


def _harmonic(m: int) -> float:
    return sum(1.0 / i for i in range(1, m + 1))


def euler_gamma(N: int = EM_N, terms: int = EM_TERMS) -> float:
    s = math.fsum(1.0 / k for k in range(1, N)) + 0.5 / N - math.log(N)
    # f^(2j-1)(N) = -(2j-1)! / N^(2j)
    s += math.fsum(float(bernoulli(2 * j)) / (2 * j * N ** (2 * j)) for j in range(1, terms + 1))
    return s


def stieltjes_gamma1(N: int = EM_N, terms: int = EM_TERMS) -> float:
    """gamma_1 = lim (sum_{k<=N} log k / k - (log N)^2 / 2)."""
    L = math.log(N)
    s = math.fsum(math.log(k) / k for k in range(2, N)) + 0.5 * L / N - 0.5 * L * L
    corr = []
    for j in range(1, terms + 1):
        m = 2 * j - 1
        # d^m/dx^m log(x)/x = (-1)^m m! (log x - H_m) / x^(m+1)
        dm = -math.factorial(m) * (L - _harmonic(m)) / N ** (m + 1)
        corr.append(float(bernoulli(2 * j)) / math.factorial(2 * j) * dm)
    return s - math.fsum(corr)


EULER_GAMMA = euler_gamma()
STIELTJES_GAMMA1 = stieltjes_gamma1()
