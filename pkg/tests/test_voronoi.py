import math

import numpy as np
import pytest

from shiftconv.coefficients import CoefficientRangeError, DoubleCoefficients
from shiftconv.reports import golden
from shiftconv.voronoi import (
    LEADING_C, MU0, PI3, SpectralParams, TwistedWeight, alternate_sigma, asymptotic_constants,
    asymptotic_error_scale, decay_check, fit_asymptotic_constants, leading_constant_readings,
    local_scale, ode_series, phase_shift_check, phi_k_asymptotic, phi_k_contour, phi_pm,
    phibeta_bound_sweep, small_x_sweep, voronoi_residual,
)
from shiftconv.weights import TestFunction

MUS = [MU0, SpectralParams.from_pair(0.1 + 2j, 0.1 - 2j), SpectralParams.from_pair(0.3, -0.1 + 0.5j)]
XS = np.array([0.5, 3.0, 40.0, 400.0])


def test_spectral_params_validation():
    with pytest.raises(ValueError):
        SpectralParams(0.1, 0.1, 0.1)
    with pytest.raises(ValueError):
        SpectralParams.from_pair(0.45, -0.2)
    assert MUS[1].conjugate_closed and not MUS[2].conjugate_closed


@pytest.mark.parametrize("mu", MUS, ids=["mu0", "mu_pair", "mu_generic"])
@pytest.mark.parametrize("k", [0, 1])
def test_contour_independent_of_line(mu, k):
    a = phi_k_contour(XS, k, mu)
    for x, v in zip(XS, a):
        b = phi_k_contour(np.array([x]), k, mu, sigma=alternate_sigma(x, k, mu))[0]
        assert abs(v - b) <= 1e-9 * max(abs(v), local_scale(x, k))


def test_contour_rejects_bad_input():
    with pytest.raises(ValueError):
        phi_k_contour(1.0, 2)
    with pytest.raises(ValueError):
        phi_k_contour(np.array([-1.0]), 0)


def test_mu0_values_are_imaginary_and_pm_conjugate():
    for k in (0, 1):
        v = phi_k_contour(XS, k)
        assert np.max(np.abs(v.real)) <= 1e-12 * np.max(np.abs(v))
    p, m = phi_pm(XS)
    assert np.max(np.abs(m + np.conj(p))) <= 1e-12 * np.max(np.abs(p))


def test_pm_combination():
    p, m = phi_pm(XS, MUS[2])
    p0 = phi_k_contour(XS, 0, MUS[2])
    p1 = phi_k_contour(XS, 1, MUS[2])
    assert np.allclose((p + m) / 2, p0, rtol=1e-13, atol=0)
    assert np.allclose((p - m) / 2 * 1j * PI3 * XS, p1, rtol=1e-12, atol=0)


@pytest.mark.parametrize("k", [0, 1])
@pytest.mark.parametrize("x", [300.0, 3000.0])
def test_contour_matches_asymptotic(k, x):
    c = phi_k_contour(x, k)
    a = phi_k_asymptotic(x, k, ell=4)
    # omitted terms start at j = 5
    assert abs(c - a) <= 1e-2 * asymptotic_error_scale(x, k, 5, 1.0)


def test_asymptotic_requires_large_argument():
    with pytest.raises(ValueError):
        phi_k_asymptotic(1.0, 0)


def test_fitted_leading_constants_select_reading():
    a, b, resid = fit_asymptotic_constants(0)
    assert resid < 1e-10
    assert abs(a[0] + LEADING_C) < 1e-8 and abs(b[0] - LEADING_C) < 1e-8
    assert abs(-2 * math.sqrt(3 * math.pi) / 3 - a[0]) < 1e-8
    r = leading_constant_readings(0, (a, b, resid))
    assert r["corrected"] < 1e-8 and r["literal"] > 1.0
    a1, b1, _ = fit_asymptotic_constants(1)
    assert abs(a1[0] + 1j * LEADING_C) < 1e-8 and abs(b1[0] + 1j * LEADING_C) < 1e-8


def test_higher_constants_follow_recursion():
    a, b, _ = fit_asymptotic_constants(0)
    ap, bp = asymptotic_constants(0, 4)
    assert np.allclose(a[:3], ap[:3], atol=1e-6) and np.allclose(b[:3], bp[:3], atol=1e-6)
    with pytest.raises(ValueError):
        asymptotic_constants(1, 3, reading="literal")


def test_ode_series_conjugate_pair():
    lp, fp = ode_series(0, 1, 5)
    lm, fm = ode_series(0, -1, 5)
    assert abs(lp - lm) < 1e-14
    assert np.allclose(fp, np.conj(fm), atol=1e-14)


@pytest.mark.parametrize("x", [500.0, 2000.0])
def test_phase_advance(x):
    meas, pred = phase_shift_check(x)
    d = abs(meas - pred)
    assert min(d, 2 * math.pi - d) < 1e-2


def test_decay_beyond_threshold():
    d = decay_check()
    assert d.passed() and d.max_ratio < 1e-9 and d.slope < -3


def test_small_x_bound_against_golden():
    r = small_x_sweep()
    assert r.max_ratio <= golden("small_x_C")


def test_phibeta_small_against_golden():
    X, q = 1000.0, 5
    Q = math.isqrt(int(X))
    # edge betas stretch the n2 range by (1 + |beta| X)^3; the CLI covers the full grid
    betas = [0.0, 1.0 / (4 * q * Q)]
    r = phibeta_bound_sweep(q, 1, betas, X)
    assert r.max_ratio <= golden("phibeta_C")
    assert all(rec["params"]["spline_err"] <= 1e-5 for rec in r.records)


def test_twisted_weight_derivative():
    w = TwistedWeight(TestFunction(), 3.0, 20.0, 0.01)
    x = np.linspace(14.0, 22.0, 7)
    h = 1e-5
    fd = (w(x + h) - w(x - h)) / (2 * h)
    assert np.max(np.abs(fd - w.derivative(x, 1))) < 1e-6


def _table(mu1, mu2, value, n_max=60):
    tab = {(n1, n2): value(n1, n2) for n1 in range(1, n_max + 1) for n2 in range(1, n_max + 1)}
    return DoubleCoefficients(mu1, mu2, tab)


def test_voronoi_residual_zero_coefficients():
    r = voronoi_residual(2, 5, _table(0, 0, lambda a, b: 0j), 40.0, 30)
    assert r.lhs == 0 and r.rhs == 0 and r.residual == 0


def test_voronoi_residual_reports_toy_table():
    # a table that is not automorphic: both sides are computed, the residual is just reported
    rng = np.random.default_rng(3)
    r = voronoi_residual(1, 3, _table(0, 0, lambda a, b: complex(rng.normal())), 40.0, 30)
    assert math.isfinite(r.residual) and math.isfinite(r.tail_estimate) and r.n2_max == 30


def test_voronoi_residual_missing_coefficients():
    with pytest.raises(CoefficientRangeError):
        voronoi_residual(1, 3, _table(0, 0, lambda a, b: 1 + 0j, n_max=10), 40.0, 30)
    with pytest.raises(ValueError):
        voronoi_residual(3, 6, _table(0, 0, lambda a, b: 0j), 40.0, 30)
