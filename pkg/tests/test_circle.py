import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from shiftconv.arith import totient
from shiftconv.circle import (
    convolution_via_circle, decomposition_residual, decomposition_sweep, farey_check, farey_dissection,
    order_Q, psi0, psi0_envelope_sweep, psi_b, sum_abs_psi,
)
from shiftconv.coefficients import builtin
from shiftconv.expsums import r_ell_batch
from shiftconv.reports import golden
from shiftconv.shifted import direct_sum
from shiftconv.weights import TestFunction

import oracles


def test_farey_small():
    arcs = farey_dissection(1)
    assert len(arcs) == 1 and arcs[0].interval == (Fraction(-1, 2), Fraction(1, 2))
    assert len(farey_dissection(5)) == sum(totient(q) for q in range(1, 6)) == 10


def test_farey_measure_exact_q100():
    c = farey_check(farey_dissection(100), 100, sum_lengths=True)
    assert c["ok"] and c["measure"] == 1


def test_farey_endpoints_are_mediants():
    Q = 12
    fr = oracles.farey_neighbors(Q)
    med = {}
    for x, y in zip(fr, fr[1:]):
        med[(x, "r")] = Fraction(x.numerator + y.numerator, x.denominator + y.denominator)
        med[(y, "l")] = med[(x, "r")]
    for arc in farey_dissection(Q):
        c = Fraction(arc.a, arc.q)
        lo, hi = arc.interval
        if 0 < c < 1:
            assert lo == med[(c, "l")] and hi == med[(c, "r")]


def test_psi0():
    assert psi0(0.0, 100.0) == pytest.approx(10.0)
    re = quad(lambda x: math.cos(2 * math.pi * x * x), 0, 1, epsabs=1e-13)[0]
    im = quad(lambda x: math.sin(2 * math.pi * x * x), 0, 1, epsabs=1e-13)[0]
    assert abs(psi0(1.0, 1.0) - complex(re, im)) < 1e-10
    for beta in (1e-7, 3e-5, -2e-4):
        X = 1e4
        re = quad(lambda x: math.cos(2 * math.pi * beta * x * x), 0, 100, limit=400, epsabs=1e-12)[0]
        im = quad(lambda x: math.sin(2 * math.pi * beta * x * x), 0, 100, limit=400, epsabs=1e-12)[0]
        assert abs(psi0(beta, X) - complex(re, im)) <= 1e-9 * abs(complex(re, im))


def test_psi_b_identities():
    q, X = 7, 400.0
    assert psi_b(0, q, 1e-4, X) == pytest.approx(2 * psi0(1e-4, X) / q)
    for b in (1, -3, 5):
        k = b / q
        want = math.sin(2 * math.pi * k * 20) / (math.pi * k) / q
        assert abs(psi_b(b, q, 0.0, X) - want) < 1e-12
    beta = 3e-4
    re = quad(lambda t: math.cos(2 * math.pi * (beta * t * t - 2 * t / q)), -20, 20, limit=400)[0]
    im = quad(lambda t: math.sin(2 * math.pi * (beta * t * t - 2 * t / q)), -20, 20, limit=400)[0]
    assert abs(psi_b(2, q, beta, X) - complex(re, im) / q) < 1e-9


def test_decomposition_q1():
    assert decomposition_residual(1, 1, 0.0, 1e4) <= 3


def test_decomposition_sweep_against_golden():
    r1, r2 = decomposition_sweep(1e4, 40, seed=1)
    assert r1.max_ratio <= golden("decomposition_C")
    assert r2.max_ratio <= golden("sum_abs_psi_C")
    Q = order_Q(1e4)
    q = 17
    assert decomposition_residual(3, q, 1.0 / (q * Q), 1e4) <= golden("decomposition_C") * math.log(q + 2)
    assert sum_abs_psi(q, -1.0 / (q * Q), 1e4) <= golden("sum_abs_psi_C") * math.log(q + 2)


def test_psi0_envelope():
    assert psi0_envelope_sweep((1e2, 1e3), 20).max_ratio <= golden("psi0_envelope")


def test_circle_identity_small():
    X = 64
    A = builtin("ones", X + 1)
    assert convolution_via_circle(X, 0, builtin("zero", X + 1)) == 0
    r3 = r_ell_batch(X, 3)
    phi = TestFunction()
    want = sum(r3[n] * float(phi(n / X)) for n in range(32, 65))
    got = convolution_via_circle(X, 0, A)
    assert abs(got - want) <= 1e-8 * want


def test_circle_real_and_aliasing_free():
    X, h = 512, 3
    A = builtin("tau", X + h + 1)
    a = convolution_via_circle(X, h, A)
    b = convolution_via_circle(X, h, A, N=8 * X)
    assert abs(a.imag) <= 1e-8 * abs(a)
    assert abs(a - b) <= 1e-9 * abs(a)
    with pytest.raises(ValueError):
        convolution_via_circle(X, h, A, N=4 * X)


def test_circle_matches_direct_4096():
    X, h = 4096, 5
    A = builtin("tau3", X + h + 1)
    d = direct_sum(X, h, A)
    assert abs(convolution_via_circle(X, h, A) - d) <= 1e-6 * abs(d)
