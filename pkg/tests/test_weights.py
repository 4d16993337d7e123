import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from shiftconv.weights import TestFunction, chirp_dft, mellin, mellin_error_estimate, mellin_transform


def test_bump_peak_and_support():
    phi = TestFunction()
    assert phi(0.75) == pytest.approx(1.0, abs=1e-15)
    assert phi(np.array([0.0, 0.5, 1.0, 1.5])).tolist() == [0.0, 0.0, 0.0, 0.0]


def test_scaled_integral_matches_quad():
    for X in (1.0, 7.0, 1e4):
        phi = TestFunction(scale=X)
        ref, _ = quad(lambda x: float(phi(x)), X / 2, X, epsabs=0, epsrel=1e-13, limit=200)
        assert phi.integral() == pytest.approx(ref, rel=1e-10)
        assert phi.integral() == pytest.approx(X * TestFunction().integral(), rel=1e-10)


def test_derivatives_against_finite_differences():
    phi = TestFunction()
    t = np.linspace(0.56, 0.94, 9)
    h = 1e-5
    for j in range(1, 4):
        fd = (phi.derivative(t + h, j - 1) - phi.derivative(t - h, j - 1)) / (2 * h)
        scale = np.max(np.abs(phi.derivative(t, j)))
        assert np.max(np.abs(fd - phi.derivative(t, j))) / scale < 1e-5


def test_derivative_order_limit():
    with pytest.raises(ValueError):
        TestFunction().derivative(0.7, 9)


def test_P_bounds_every_derivative():
    phi = TestFunction()
    sups = phi.derivative_sups
    assert all(sups[j] <= phi.P**j * (1 + 1e-12) for j in range(1, 9))
    assert any(abs(sups[j] - phi.P**j) < 1e-9 * phi.P**j for j in range(1, 9))
    # P scales like 1/X
    assert TestFunction(scale=10.0).P == pytest.approx(phi.P / 10.0, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-40, 40), st.integers(1, 3))
def test_mellin_integration_by_parts(sigma, t, j):
    # int phi^(j)(u) u^(s+j-1) du = (-1)^j s (s+1) ... (s+j-1) int phi(u) u^(s-1) du
    phi = TestFunction()
    s = complex(sigma, t)
    lhs = mellin_transform(lambda u: phi.derivative(u, j), s + j, 0.5, 1.0)
    poch = math.prod(s + i for i in range(j))
    rhs = (-1) ** j * poch * mellin(phi, s)
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))


def test_mellin_converged():
    phi = TestFunction()
    s = np.array([0.3 + 5j, -2 + 30j, 1.0])
    assert mellin_error_estimate(phi, s) < 1e-13


def test_mellin_rejects_unbounded_support():
    with pytest.raises(ValueError):
        mellin_transform(lambda u: u, 1.0, 0.0, 1.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 60), st.integers(1, 60), st.floats(0.001, 3.0))
def test_chirp_dft_matches_direct_sum(N, n, a):
    rng = np.random.default_rng(N * 61 + n)
    x = rng.normal(size=N) + 1j * rng.normal(size=N)
    m = np.arange(n)[:, None]
    l = np.arange(N)[None, :]
    ref = np.exp(-1j * a * m * l) @ x
    assert np.max(np.abs(chirp_dft(x, n, a) - ref)) < 1e-11 * max(1.0, np.max(np.abs(ref)))
