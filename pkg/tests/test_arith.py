import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftconv.arith import (
    crt_split, divisors, epsilon_q, factor_chain, factorize, inv_mod, is_prime, jacobi_symbol,
    sum_log_divisors, tau, tau3, tau_k_table,
)

import oracles


def test_factorize_small():
    assert factorize(1).factors == ()
    assert factorize(12).as_dict() == {2: 2, 3: 1}


def test_factorize_mersenne_62():
    n = 2**62 - 1
    f = factorize(n)
    assert math.prod(p**e for p, e in f.factors) == n
    assert all(is_prime(p) for p, _ in f.factors)
    assert f.as_dict() == {3: 1, 715827883: 1, 2147483647: 1}


@given(st.integers(1, 2**63))
@settings(max_examples=60, deadline=None)
def test_factorize_product_and_order(n):
    f = factorize(n)
    assert math.prod(p**e for p, e in f.factors) == n
    ps = [p for p, _ in f.factors]
    assert ps == sorted(set(ps))
    assert all(is_prime(p) for p in ps)


def test_inv_mod_examples():
    assert inv_mod(1, 7) == 1
    assert inv_mod(3, 7) == 5
    with pytest.raises(ValueError):
        inv_mod(2, 4)


@given(st.integers(2, 10**6), st.integers(-10**9, 10**9))
def test_inv_mod_random(q, a):
    if math.gcd(a, q) != 1:
        return
    assert a * inv_mod(a, q) % q == 1


def test_jacobi_examples():
    assert all(jacobi_symbol(1, n) == 1 for n in range(1, 200, 2))
    assert jacobi_symbol(2, 15) == 1
    with pytest.raises(ValueError):
        jacobi_symbol(3, 10)


def test_jacobi_matches_residue_count():
    for p in (q for q in range(3, 200, 2) if is_prime(q)):
        for a in range(p):
            count = sum(1 for x in range(p) if x * x % p == a)
            assert jacobi_symbol(a, p) == count - 1


def test_jacobi_multiplicativity_exhaustive():
    for n in range(1, 1000, 2):
        row = [jacobi_symbol(a, n) for a in range(n)]
        for a in (2, 3, 5, 7, n + 4):
            assert jacobi_symbol(a, n) == row[a % n]
        for a, b in ((2, 3), (5, 7), (11, 13)):
            assert jacobi_symbol(a * b, n) == row[a % n] * row[b % n]
    for m, n in ((3, 5), (7, 9), (15, 11), (21, 25)):
        for a in range(40):
            assert jacobi_symbol(a, m * n) == jacobi_symbol(a, m) * jacobi_symbol(a, n)


def test_epsilon():
    assert epsilon_q(5) == 1
    assert epsilon_q(3) == 1j
    assert epsilon_q(1) == 1
    with pytest.raises(ValueError):
        epsilon_q(4)


def test_crt_examples():
    a1, a2 = crt_split(1, 3, 4)
    assert (a1 * 4 + a2 * 3) % 12 == 1
    a1, a2 = crt_split(7, 3, 5)
    assert (a1 * 5 + a2 * 3) % 15 == 7
    with pytest.raises(ValueError):
        crt_split(1, 4, 6)


def test_crt_exhaustive_with_inverse_relation():
    for qA in range(1, 60):
        for qB in range(1, 10**4 // qA + 1, 7):
            if math.gcd(qA, qB) != 1 or qA * qB > 10**4 or qA * qB < 2:
                continue
            q = qA * qB
            for a in range(1, q, max(1, q // 23)):
                if math.gcd(a, q) != 1:
                    continue
                a1, a2 = crt_split(a, qA, qB)
                assert 0 <= a1 < qA and 0 <= a2 < qB
                assert (a1 * qB + a2 * qA) % q == a
                ab = pow(a, -1, q)
                ib1 = pow(a1, -1, qA) if qA > 1 else 0
                ib2 = pow(a2, -1, qB) if qB > 1 else 0
                iB = pow(qB, -1, qA) if qA > 1 else 0
                iA = pow(qA, -1, qB) if qB > 1 else 0
                assert (ib1 * qB * iB * iB + ib2 * qA * iA * iA) % q == ab


def test_factor_chain_examples():
    assert factor_chain(10, 2).as_tuple() == (2, 1, 5, 1)
    assert factor_chain(72, 6).as_tuple() == (1, 72, 1, 1)
    assert factor_chain(1, 1).as_tuple() == (1, 1, 1, 1)


def _squarefull(m):
    return all(e >= 2 for _, e in factorize(m).factors)


def test_factor_chain_invariants_and_maximality():
    for q in range(1, 10**4, 37):
        for n1 in divisors(q):
            fc = factor_chain(q, n1)
            q1, q2, sf, ff = fc.as_tuple()
            assert q1 * q2 * sf * ff == q
            assert n1 % q1 == 0 and math.gcd(q1, q // q1) == 1
            assert all(n1 % p == 0 for p, _ in factorize(q2).factors)
            assert math.gcd(q2, q // (q1 * q2)) == 1
            assert math.gcd(sf, 2 * ff) == 1 and all(e == 1 for _, e in factorize(sf).factors)
            assert _squarefull(4 * ff)
            for d in divisors(n1):
                if q % d == 0 and d > q1 and math.gcd(d, q // d) == 1:
                    # a larger admissible q1 must fail the n1-divisibility or coprimality test
                    assert q1 % d == 0 or n1 % d != 0


def test_divisor_functions():
    assert tau(1) == 1 and tau3(1) == 1
    assert tau3(12) == 18 == oracles.tau3(12)
    assert math.isclose(sum_log_divisors(6), math.log(36))
    t2 = tau_k_table(10**5, 2)
    t3 = tau_k_table(10**5, 3)
    for n in range(1, 10**5 + 1, 997):
        assert t3[n] == sum(t2[d] for d in divisors(n))
        assert t2[n] == oracles.divisor_count(n) if n < 5000 else True
