import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftconv.arith import divisors, epsilon_q
from shiftconv.charsum import (
    C1_prime_product, C_direct, C_split, C_starstar_split, CharSumParams, T_from_tilde, T_prime, T_tilde,
    cascade, composite_items, lemma52_sweep, prop33_sweep, tilde_identity_sweep,
)
from shiftconv.expsums import salie

import oracles


def close(a, b, scale=1.0, rel=1e-9):
    return abs(a - b) <= rel * max(abs(a), abs(b), scale)


def test_trivial_modulus():
    assert close(C_direct(CharSumParams(3, 1, 4, 1, 5, 9, 2, 1)), 1)


def test_q3_hand_value():
    p = CharSumParams(0, 0, 0, 1, 1, 0, 0, 3)
    assert close(C_direct(p), oracles.char_sum(0, 0, 0, 1, 1, 0, 0, 3))


def test_order_reversed_oracle():
    rng = np.random.default_rng(7)
    for q, n1 in ((12, 2), (12, 1), (18, 3), (20, 4), (9, 9)):
        b1, b2, b3, n2, h, v = (int(x) for x in rng.integers(-20, 20, size=6))
        p = CharSumParams(b1, b2, b3, n1, n2, abs(h), v, q)
        assert close(C_direct(p), oracles.char_sum(b1, b2, b3, n1, n2, abs(h), v, q), q**3)


def test_rejects_n1_not_dividing_q():
    with pytest.raises(ValueError):
        CharSumParams(0, 0, 0, 5, 1, 0, 0, 12)


def test_split_q45():
    p = CharSumParams(2, 5, 7, 3, 4, 1, 6, 45)
    cs, css = C_split(p)
    assert close(cs * css, C_direct(p), 45**3)


def test_split_degenerate_and_q3_12():
    p = CharSumParams(1, 2, 3, 1, 5, 2, 1, 35)
    cs, css = C_split(p)
    assert close(cs, 1) and close(css, C_direct(p), 35**3)
    p = CharSumParams(1, 2, 3, 1, 5, 2, 1, 12)
    c1, c2 = C_starstar_split(p)
    assert close(c1 * c2, C_split(p)[1], 12**3)


def test_prime_product_shapes():
    for q, k in ((13, 1), (15, 2), (105, 3)):
        p = CharSumParams(1, 4, 2, 1, 3, 5, 7, q)
        fac = C1_prime_product(p)
        assert len(fac) == k
        assert close(np.prod(fac), C_starstar_split(p)[0], q**3)


def test_cascade_sweep():
    for p in composite_items(1000, 60, seed=3):
        c = cascade(p)
        assert c["dev_chain"] < 1e-9 and c["dev_split"] < 1e-9


@given(st.integers(2, 60), st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30),
       st.integers(-30, 30), st.integers(0, 30), st.integers(-30, 30))
@settings(max_examples=60, deadline=None)
def test_periodicity_and_symmetry(q, b1, b2, b3, n2, h, v):
    ds = divisors(q)
    n1 = ds[(b1 * 7 + n2) % len(ds)]
    base = C_direct(CharSumParams(b1, b2, b3, n1, n2, h, v, q))
    scale = q**3 * q
    assert close(base, C_direct(CharSumParams(b1 + q, b2, b3 - 2 * q, n1, n2, h, v, q)), scale)
    assert close(base, C_direct(CharSumParams(b3, b1, b2, n1, n2, h, v, q)), scale)


def test_tilde_identity_small_primes():
    recs = tilde_identity_sweep(31, 5, seed=2)
    assert max(r["dev"] for r in recs) < 1e-9


def test_tilde_opened_oracle_p5():
    for args in ((5, 3, 2, 1, 4), (5, 1, 0, 2, 3), (7, 2, 5, 3, 1)):
        assert abs(T_tilde(*args) - oracles.T_tilde_opened(*args)) < 1e-9


def test_tilde_case_p_divides_h():
    for p in (5, 7, 11, 13):
        for w in range(p):
            v = T_tilde(p, 0, w, 3, 2)
            assert abs(v) <= 2 * p**1.5 + 1e-9


def test_tilde_equals_minus_salie_when_p_divides_n2():
    for p in (5, 7, 11, 13, 17):
        for r1h in range(1, p):
            for w in (0, 1, p - 1):
                t = T_tilde(p, r1h, w, 2, 0)
                assert abs(t + salie(r1h, -w, p)) < 1e-9
                assert abs(t) <= 2 * math.sqrt(p) + 1e-9


def test_lemma52_cases_and_reproducible():
    rep = lemma52_sweep(97, 3, seed=5)
    assert rep.cases["p|h"].max_ratio <= 2.0
    for r in rep.records:
        if r["params"]["case"] == "p!h,p|n2":
            assert r["ratio"] <= 2 / math.sqrt(r["params"]["p"]) + 1e-12
    again = lemma52_sweep(97, 3, seed=5)
    assert again.max_ratio == rep.max_ratio and again.argmax_params == rep.argmax_params
    p = rep.argmax_params
    tt = T_tilde(p["p"], p["r1"] * p["h"], p["w"], p["r2"], p["r3"] * p["n2"])
    assert abs(tt) / (math.sqrt(math.gcd(p["h"], p["p"])) * p["p"]) == pytest.approx(rep.max_ratio, rel=1e-12)


def test_prop33_small():
    rep = prop33_sweep(300, 40, seed=4)
    assert 0 < rep.max_ratio < 10
    assert rep.samples == 40


def test_T_prime_against_tilde_direct():
    p, h, v, r1, r2, r3, n2, bs = 11, 4, 3, 2, 5, 7, 9, (1, 2, 3)
    w = pow(4, -1, p) * (4 * v + 14) % p
    assert abs(T_prime(p, h, v, r1, r2, r3, n2, bs) - epsilon_q(p) ** 3 * p**1.5 * T_tilde(p, r1 * h, w, r2, r3 * n2)) < 1e-9
    assert abs(T_from_tilde(p, 1.0) - epsilon_q(p) ** 3 * p**1.5) < 1e-12
