"""GL(3) Voronoi weight functions: Mellin-Barnes contour, asymptotics, decay.

For a weight w supported in (0, inf) and k in {0, 1},

    Phi_k(x) = int_{Re s = sigma} (pi^3 x)^(-s) G_k(s) w~(-s-k) ds,
    G_k(s) = prod_j Gamma((1+s+mu_j+2k)/2) / Gamma((-s-mu_j)/2),

with ds = i dt along the line, and Phi^{+-}(x) = Phi_0(x) +- Phi_1(x)/(i pi^3 x).
Every weight is first rescaled to have support ending at 1; with L the right
end of the support, Phi_k(x) = L^(-k) Phi_k^{rescaled}(x L).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import loggamma

from .weights import TestFunction, chirp_dft

PI3 = math.pi**3
LEADING_C = 2.0 * math.sqrt(3.0 * math.pi) / 3.0

# Two readings of the j = 1 constant list: the second assignment either
# concerns a_1(1) (corrected) or re-assigns a_0(1) and leaves a_1(1) open (literal).
LEADING_CONSTANTS = {
    "corrected": {0: (-LEADING_C, LEADING_C), 1: (-1j * LEADING_C, -1j * LEADING_C)},
    "literal": {0: (-1j * LEADING_C, LEADING_C), 1: (None, -1j * LEADING_C)},
}

PANEL = 25.0
T_MAX = 20000.0
REL_STOP = 1e-10
SIGMA_STEP = 0.5
IBP_ORDER = 8
SIGMA_TOP = 3.0
PROFILE_T = 1000.0
Y_CHUNK = 2048


class ContourError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectralParams:
    mu1: complex = 0j
    mu2: complex = 0j
    mu3: complex = 0j

    def __post_init__(self):
        mu = self.mu
        if abs(sum(mu)) > 1e-12:
            raise ValueError(f"spectral parameters must have trace zero, got sum {sum(mu)}")
        if max(abs(m.real) for m in mu) > 0.4 + 1e-12:
            raise ValueError("need |Re mu_j| <= 1/2 - 1/10")

    @classmethod
    def from_pair(cls, mu1, mu2) -> "SpectralParams":
        return cls(complex(mu1), complex(mu2), -complex(mu1) - complex(mu2))

    @property
    def mu(self) -> tuple[complex, complex, complex]:
        return (complex(self.mu1), complex(self.mu2), complex(self.mu3))

    @property
    def conjugate_closed(self) -> bool:
        """True when {conj mu_j} = {mu_j}, so G_k(conj s) = conj G_k(s)."""
        a = sorted(self.mu, key=lambda z: (round(z.real, 12), round(z.imag, 12)))
        b = sorted((z.conjugate() for z in self.mu), key=lambda z: (round(z.real, 12), round(z.imag, 12)))
        return all(abs(u - v) < 1e-12 for u, v in zip(a, b))

    def sigma_min(self, k: int) -> float:
        return max(-1.0 - m.real - 2 * k for m in self.mu)


MU0 = SpectralParams()


@dataclass(frozen=True)
class TwistedWeight:
    """w(x) = phi((x - h)/X) e(-beta x), the weight met on the major arcs."""

    phi: TestFunction
    h: float
    X: float
    beta: float = 0.0

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self.phi.support
        return self.h + self.X * lo, self.h + self.X * hi

    @property
    def is_real(self) -> bool:
        return self.beta == 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = self.phi((x - self.h) / self.X)
        if self.beta == 0.0:
            return v
        return v * np.exp(-2j * math.pi * np.fmod(self.beta * x, 1.0))

    def derivative(self, x, j: int):
        x = np.asarray(x, dtype=float)
        t = (x - self.h) / self.X
        if self.beta == 0.0:
            return self.phi.derivative(t, j) / self.X**j
        c = -2j * math.pi * self.beta
        out = sum(math.comb(j, i) * self.phi.derivative(t, i) / self.X**i * c ** (j - i) for i in range(j + 1))
        return out * np.exp(-2j * math.pi * np.fmod(self.beta * x, 1.0))


def _is_real(w) -> bool:
    return getattr(w, "is_real", True)


@dataclass(frozen=True)
class _Rescaled:
    w: object

    @property
    def L(self) -> float:
        return float(self.w.support[1])

    @property
    def lo(self) -> float:
        return float(self.w.support[0]) / self.L

    def __call__(self, t):
        return self.w(np.asarray(t) * self.L)

    def derivative(self, t, j: int):
        return self.w.derivative(np.asarray(t) * self.L, j) * self.L**j


def _log_gamma_ratio(s: np.ndarray, k: int, mu) -> np.ndarray:
    out = np.zeros(s.shape, dtype=complex)
    for m in mu:
        den = (-s - m) / 2
        with np.errstate(all="ignore"):
            lg = loggamma(den)
        pole = (np.abs(den.imag) < 1e-14) & (den.real <= 0) & (np.abs(den.real - np.round(den.real)) < 1e-14)
        lg = np.where(pole, np.inf + 0j, lg)
        out += loggamma((1 + s + m + 2 * k) / 2) - lg
    return out


class _Kernel:
    """H(t) = G_k(sigma+it) w~(-sigma-it-k) on a uniform t-grid, grown panel by panel.

    The Mellin transform of a smooth bump decays faster than any power, so past
    some height the computed values are pure roundoff (about eps times the L1
    norm of the integrand in v). Such entries are set to zero and their possible
    size, times |G_k|, is kept as a noise estimate; a panel made only of such
    entries ends the integration.
    """

    def __init__(self, rw: _Rescaled, k: int, mu: tuple, sigma: float, dt: float, symmetric: bool):
        self.rw, self.k, self.mu, self.sigma, self.dt = rw, k, mu, sigma, dt
        self.symmetric = symmetric
        self.panels: list[tuple[np.ndarray, np.ndarray, np.ndarray, bool]] = []
        self._v = None

    def _mellin_nodes(self, tmax: float):
        lo = math.log(self.rw.lo)
        n = max(512, int(2.0 * (-lo) * max(tmax, 1.0)) + 1)
        n += n % 2
        if self._v is None or len(self._v[0]) < n + 1:
            v = np.linspace(lo, 0.0, n + 1)
            u = np.exp(v)
            dv = v[1] - v[0]
            w0 = np.asarray(self.rw(u), dtype=complex) * dv
            wj = np.asarray(self.rw.derivative(u, IBP_ORDER), dtype=complex) * u**IBP_ORDER * dv
            self._v = (v, w0, wj)
        return self._v

    def mellin_line(self, re: float, t0: float, dt: float, n: int) -> tuple[np.ndarray, np.ndarray]:
        """(w~(-s), roundoff floor) at s = re + i(t0 + m dt), m < n.

        On the uniform v-grid the sum over nodes is a chirp-z transform once the
        phase e^{-i t0 v} is pulled out, so a panel costs a few FFTs. Far up the
        line the direct sum is swamped by roundoff, while after IBP_ORDER
        integrations by parts, w~(-s) = int w^(j)(u) u^(j-1-s) du / (s(s-1)...(s-j+1)),
        the floor drops by roughly (P/|t|)^j; each entry takes the better of the two.
        """
        tmax = max(abs(t0), abs(t0 + (n - 1) * dt))
        v, w0, wj = self._mellin_nodes(tmax + 1.0)
        dv = v[1] - v[0]
        damp = np.exp(-re * v - 1j * t0 * v)
        lead = np.exp(-1j * (np.arange(n) * dt) * v[0])
        m0 = lead * chirp_dft(w0 * damp, n, dt * dv)
        mj = lead * chirp_dft(wj * damp, n, dt * dv)
        s = re + 1j * (t0 + np.arange(n) * dt)
        poch = np.ones(n, dtype=complex)
        for r in range(IBP_ORDER):
            poch *= s - r
        # roundoff of the phases t v grows with |t|
        rel = np.finfo(float).eps * (64.0 + np.abs(s.imag) * float(np.max(np.abs(v))))
        er = np.exp(-re * v)
        f0 = rel * float(np.abs(w0) @ er)
        with np.errstate(divide="ignore", invalid="ignore"):
            fj = rel * float(np.abs(wj) @ er) / np.abs(poch)
            use = fj < f0
            return np.where(use, mj / poch, m0), np.where(use, fj, f0)

    def panel(self, i: int):
        while len(self.panels) <= i:
            j = len(self.panels)
            n = int(round(PANEL / self.dt))
            t0 = (0.5 * self.dt) + j * PANEL
            re = self.sigma + self.k
            M, fl = self.mellin_line(re, t0, self.dt, n)
            t = t0 + np.arange(n) * self.dt
            if not self.symmetric:
                Mn, fln = self.mellin_line(re, -t[-1], self.dt, n)
                M, fl = np.concatenate([Mn, M]), np.concatenate([fln, fl])
                t = np.concatenate([-t[::-1], t])
            s = self.sigma + 1j * t
            with np.errstate(all="ignore"):
                G = np.exp(_log_gamma_ratio(s, self.k, self.mu))
            G = np.where(np.isfinite(G), G, 0.0)
            lost = np.abs(M) < fl
            H = np.where(lost, 0.0, G * M)
            self.panels.append((s, H, np.where(lost, fl * np.abs(G), 0.0), bool(lost.all())))
        return self.panels[i]


@lru_cache(maxsize=64)
def _kernel(rw: _Rescaled, k: int, mu: tuple, sigma: float, dt: float, symmetric: bool) -> _Kernel:
    return _Kernel(rw, k, mu, sigma, dt, symmetric)


@dataclass
class ContourValue:
    value: np.ndarray
    sigma: float
    T: float
    noise_floor: np.ndarray
    panels: int = field(default=0)


def default_dt(k: int, mu: SpectralParams, sigma: float) -> float:
    """Trapezoid step on the line. The error decays like exp(-2 pi d/dt), d the
    distance from the line to the nearest gamma pole."""
    return min(0.05, (sigma - mu.sigma_min(k)) / 5.0)


def _contour_rescaled(y: np.ndarray, rw: _Rescaled, k: int, mu: SpectralParams, sigma: float, dt=None):
    if sigma <= mu.sigma_min(k):
        raise ValueError(f"sigma={sigma} not admissible: need sigma > {mu.sigma_min(k)} for k={k}")
    dt = float(dt or default_dt(k, mu, sigma))
    symmetric = mu.conjugate_closed and _is_real(rw.w)
    ker = _kernel(rw, k, mu.mu, float(sigma), dt, symmetric)
    if len(y) > Y_CHUNK:
        parts = [_contour_rescaled(y[i : i + Y_CHUNK], rw, k, mu, sigma, dt) for i in range(0, len(y), Y_CHUNK)]
        return ContourValue(
            np.concatenate([c.value for c in parts]), sigma, max(c.T for c in parts),
            np.concatenate([c.noise_floor for c in parts]), max(c.panels for c in parts),
        )
    logy = np.log(PI3 * y)
    acc = np.zeros(y.shape, dtype=complex)
    mass = np.zeros(y.shape)
    lost = np.zeros(y.shape)
    quiet = 0
    i = 0
    while True:
        s, H, L, dead = ker.panel(i)
        i += 1
        if dead:
            break
        ys = np.exp(-np.outer(logy, s))
        f = ys * H[None, :]
        contrib = f.sum(axis=1) * dt
        mass += np.abs(f).sum(axis=1) * dt
        lost += (np.abs(ys) * L[None, :]).sum(axis=1) * dt
        if symmetric:
            contrib = 2.0 * contrib.real
        acc += contrib
        small = np.all(np.abs(contrib) <= REL_STOP * np.abs(acc) + 1e-15 * mass)
        quiet = quiet + 1 if small else 0
        if quiet >= 3:
            break
        if i * PANEL >= T_MAX:
            raise ContourError(f"contour truncation did not converge by T={T_MAX} (k={k}, sigma={sigma})")
    scale = 2.0 if symmetric else 1.0
    noise = scale * (np.finfo(float).eps * mass * math.sqrt(i * PANEL / dt) + lost)
    return ContourValue(1j * acc, sigma, i * PANEL, noise, i)


@lru_cache(maxsize=64)
def _log_mass_profile(rw: _Rescaled, k: int, mu: SpectralParams):
    """sigma grid and log int |G_k w~| dt, the y-independent part of the L1 mass."""
    lo = mu.sigma_min(k)
    sig = np.arange(math.floor(lo) + SIGMA_STEP, SIGMA_TOP - k + 1e-9, SIGMA_STEP)
    sig = sig[sig > lo + 0.2]
    ker = _Kernel(rw, k, mu.mu, 0.0, 1.0, True)
    dt = 0.5
    t = np.arange(0.0, PROFILE_T, dt)
    prof = []
    for sg in sig:
        M, fl = ker.mellin_line(sg + k, 0.0, dt, len(t))
        with np.errstate(all="ignore"):
            lg = _log_gamma_ratio(sg + 1j * t, k, mu.mu).real + np.log(np.maximum(np.abs(M), fl))
        lg = np.where(np.isfinite(lg), lg, -np.inf)
        top = np.max(lg)
        prof.append(top + math.log(np.sum(np.exp(lg - top)) * dt))
    return sig, np.array(prof)


def best_sigma(x, k: int, mu: SpectralParams = MU0, phi=None):
    """Admissible sigma minimizing the L1 mass of the integrand, hence the roundoff floor."""
    phi = phi or TestFunction()
    rw = _Rescaled(phi)
    sig, prof = _log_mass_profile(rw, k, mu)
    y = np.atleast_1d(np.asarray(x, dtype=float)) * rw.L
    best = sig[np.argmin(prof[None, :] - np.outer(np.log(PI3 * y), sig), axis=1)]
    return best if np.ndim(x) else float(best[0])


def alternate_sigma(x: float, k: int, mu: SpectralParams = MU0, phi=None) -> float:
    """A second admissible line next to the best one, for contour-shift checks."""
    b = best_sigma(x, k, mu, phi)
    return b - SIGMA_STEP if b - SIGMA_STEP > mu.sigma_min(k) + 0.2 else b + SIGMA_STEP


def phi_k_contour_detail(x, k: int, mu: SpectralParams = MU0, sigma=None, phi=None, dt=None) -> ContourValue:
    if k not in (0, 1):
        raise ValueError("k must be 0 or 1")
    phi = phi or TestFunction()
    rw = _Rescaled(phi)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    y = x * rw.L
    sig = np.full(len(x), float(sigma)) if sigma is not None else best_sigma(x, k, mu, phi)
    val = np.empty(len(x), dtype=complex)
    noise = np.empty(len(x))
    T = 0.0
    for sg in np.unique(sig):
        m = sig == sg
        cv = _contour_rescaled(y[m], rw, k, mu, float(sg), dt)
        val[m] = cv.value * rw.L ** (-k)
        noise[m] = cv.noise_floor * rw.L ** (-k)
        T = max(T, cv.T)
    return ContourValue(val, float(sig[0]) if len(set(sig)) == 1 else float("nan"), T, noise)


def phi_k_contour(x, k: int, mu: SpectralParams = MU0, sigma=None, phi=None, dt=None):
    """Phi_k(x) by trapezoid quadrature on Re s = sigma (sigma=None picks the best line)."""
    cv = phi_k_contour_detail(x, k, mu, sigma, phi, dt)
    return cv.value if np.ndim(x) else complex(cv.value[0])


def phi_pm(x, mu: SpectralParams = MU0, phi=None, sigma=None):
    """(Phi^+, Phi^-) = Phi_0 +- Phi_1/(i pi^3 x)."""
    p0 = phi_k_contour(x, 0, mu, sigma, phi)
    p1 = phi_k_contour(x, 1, mu, sigma, phi)
    corr = p1 / (1j * PI3 * np.asarray(x, dtype=float))
    return p0 + corr, p0 - corr


def _ode_operator(nu: complex, c: complex, rhos) -> np.ndarray:
    """prod_i (theta_y - rho_i) + 64 y^2 applied to e^{c w} w^nu with y = w^3.

    Returns D with D[e] the coefficient of e^{c w} w^(nu + 6 - e), e = 0..6.
    """
    coef = np.zeros(7, dtype=complex)
    coef[0] = 1.0
    for r in rhos:
        new = np.zeros(7, dtype=complex)
        for j in range(7):
            if coef[j] == 0:
                continue
            # theta_y = theta_w / 3 and theta_w (e^{cw} w^p) = e^{cw} (c w^{p+1} + p w^p)
            if j + 1 < 7:
                new[j + 1] += coef[j] * c / 3
            new[j] += coef[j] * ((nu + j) / 3 - r)
        coef = new
    coef[6] += 64
    return coef[::-1]


@lru_cache(maxsize=32)
def ode_series(k: int, sign: int, n_terms: int, mu: tuple = (0j, 0j, 0j)) -> tuple[complex, np.ndarray]:
    """Formal solution e^{c w} w^lam sum_n f_n w^-n of the differential equation behind Phi_k.

    With K(y) = int y^{-s} G_k(s) ds, the shift s -> s + 2 in the gamma ratio gives
    prod_j (theta - 1 - 2k - mu_j)(theta - 2 - mu_j) K + 64 y^2 K = 0. The
    exponentials are e^{c w}, c = +-6i, w = y^(1/3); f_0 = 1.
    """
    c = 6j * sign
    rhos = [r for m in mu for r in (1 + 2 * k + m, 2 + m)]
    D = lambda nu: _ode_operator(nu, c, rhos)  # noqa: E731
    d0, d1 = D(0.0)[1], D(1.0)[1]
    lam = -d0 / (d1 - d0)
    f = [1.0 + 0j]
    for N in range(2, n_terms + 1):
        rhs = sum(f[N - e] * D(lam - N + e)[e] for e in range(2, min(6, N) + 1))
        f.append(-rhs / D(lam - N + 1)[1])
    return complex(lam), np.array(f)


def asymptotic_constants(k: int, ell: int, mu: SpectralParams = MU0, reading: str = "corrected"):
    """(a_k(j), b_k(j)) for j = 1..ell: the j = 1 values from the constant list, the
    rest propagated by the recursion of the formal series."""
    a1, b1 = LEADING_CONSTANTS[reading][k]
    if a1 is None or b1 is None:
        raise ValueError(f"reading {reading!r} leaves a leading constant for k={k} unspecified")
    _, fp = ode_series(k, +1, ell, mu.mu)
    _, fm = ode_series(k, -1, ell, mu.mu)
    return a1 * fp[:ell], b1 * fm[:ell]


def _u_grid(w, n: int = 20001):
    lo, hi = w.support
    u = np.linspace(lo, hi, n)
    return u, np.asarray(w(u), dtype=complex) * (u[1] - u[0])


def _asym_terms(x: float, k: int, ell: int, w) -> np.ndarray:
    """Rows j = 1..ell of (pi^3 x)^{k+1} int w(u) e(+-3 (xu)^{1/3}) (pi^3 x u)^{-j/3} du."""
    u, wu = _u_grid(w)
    z = PI3 * x * u
    ph = np.exp(6j * z ** (1.0 / 3.0))
    out = np.empty((ell, 2), dtype=complex)
    for j in range(1, ell + 1):
        base = wu * z ** (-j / 3.0)
        out[j - 1, 0] = np.sum(base * ph)
        out[j - 1, 1] = np.sum(base / ph)
    return out * (PI3 * x) ** (k + 1)


def phi_k_asymptotic(x: float, k: int, ell: int = 3, phi=None, X: float | None = None,
                     mu: SpectralParams = MU0, constants=None) -> complex:
    """Stationary-phase expansion of Phi_k through j = ell.

    X is the size of the weight's support (defaults to its right end); the
    expansion needs x X >= 10.
    """
    w = phi or TestFunction()
    X = X if X is not None else float(w.support[1])
    if not 1 <= ell <= 8:
        raise ValueError("ell must be in [1, 8]")
    if x * X < 10:
        raise ValueError(f"asymptotic regime needs xX >= 10, got {x * X:.3g}")
    a, b = constants if constants is not None else asymptotic_constants(k, ell, mu)
    T = _asym_terms(x, k, ell, w)
    return complex(np.sum(T[:, 0] * np.asarray(a)[:ell] + T[:, 1] * np.asarray(b)[:ell]))


def asymptotic_error_scale(x: float, k: int, ell: int, X: float) -> float:
    """(pi^3 x)^k (pi^3 x X)^{1/2 - ell/3}, the size of the omitted terms."""
    return (PI3 * x) ** k * (PI3 * x * X) ** (0.5 - ell / 3.0)


def local_scale(x: float, k: int, phi=None) -> float:
    """(pi^3 x)^{k+1} int |w(u)| (pi^3 x u)^{-1/3} du, the size of the leading term."""
    w = phi or TestFunction()
    u, wu = _u_grid(w, 4001)
    return float((PI3 * x) ** (k + 1) * np.sum(np.abs(wu) * (PI3 * x * u) ** (-1.0 / 3.0)))


def fit_asymptotic_constants(k: int, ell: int = 4, ys=None, mu: SpectralParams = MU0, phi=None):
    """Least-squares (a_k(j), b_k(j)), j <= ell, from contour values at y = xX in ys.

    The fit is linear: each contour value is matched against the j-th oscillatory
    integrals of the expansion, rows weighted by the local scale.
    """
    w = phi or TestFunction()
    L = float(w.support[1])
    ys = np.geomspace(300.0, 3e4, 48) if ys is None else np.asarray(ys, dtype=float)
    xs = ys / L
    vals = phi_k_contour(xs, k, mu, phi=w)
    rows, rhs = [], []
    for x, v in zip(xs, vals):
        sc = local_scale(x, k, w)
        T = _asym_terms(x, k, ell, w) / sc
        rows.append(np.concatenate([T[:, 0], T[:, 1]]))
        rhs.append(v / sc)
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    resid = float(np.max(np.abs(np.array(rows) @ sol - np.array(rhs))))
    return sol[:ell], sol[ell:], resid


def leading_constant_readings(k: int, fitted=None) -> dict[str, float]:
    """Distance of each reading of the j = 1 constants from the fitted ones."""
    a, b, _ = fitted if fitted is not None else fit_asymptotic_constants(k)
    out = {}
    for name, table in LEADING_CONSTANTS.items():
        a1, b1 = table[k]
        da = abs(a[0] - a1) if a1 is not None else float("nan")
        db = abs(b[0] - b1) if b1 is not None else float("nan")
        out[name] = max(da, db) if a1 is not None and b1 is not None else (db if a1 is None else da)
    return out


def narrow_weight(center: float, width: float) -> TwistedWeight:
    """Canonical bump moved to [center - width/2, center + width/2]."""
    return TwistedWeight(TestFunction(), center - 1.5 * width, 2.0 * width)


def oscillation_phase(x: float, center: float = 1.0, width: float = 0.05) -> float:
    """Phase theta of the leading oscillation for a weight concentrated at u0 = center.

    With mu = 0, Phi_0 ~ -2ic (pi^3 x) I_sin and Phi_1 ~ -2ic (pi^3 x)^2 I_cos, where
    I_sin, I_cos carry sin and cos of theta = 6 pi (x u0)^(1/3); theta comes back mod 2 pi.
    """
    w = narrow_weight(center, width)
    p0 = phi_k_contour(x, 0, MU0, phi=w)
    p1 = phi_k_contour(x, 1, MU0, phi=w)
    s_ = (p0 / (-2j * LEADING_C * PI3 * x)).real
    c_ = (p1 / (-2j * LEADING_C * (PI3 * x) ** 2)).real
    return math.atan2(s_, c_) % (2 * math.pi)


def phase_shift_check(x: float, center: float = 1.0, width: float = 0.05) -> tuple[float, float]:
    """(measured, predicted) phase advance mod 2 pi when x is doubled."""
    meas = (oscillation_phase(2 * x, center, width) - oscillation_phase(x, center, width)) % (2 * math.pi)
    pred = (6 * math.pi * ((2 * x) ** (1 / 3) - x ** (1 / 3)) * center ** (1 / 3)) % (2 * math.pi)
    return meas, pred


def _PX(w) -> float:
    """P X for a weight: derivative-bound parameter P (x-units) times its size X."""
    if isinstance(w, TestFunction):
        return w.P * w.scale
    if isinstance(w, TwistedWeight):
        return w.phi.P * (1.0 + abs(w.beta) * w.X)
    raise TypeError("unsupported weight")


def _weight_X(w) -> float:
    return w.scale if isinstance(w, TestFunction) else w.X


@dataclass
class DecayReport:
    threshold: float
    ys: np.ndarray
    values: np.ndarray
    PX3: float
    max_ratio: float
    slope: float

    def passed(self, ratio_tol: float = 1e-8, slope_tol: float = -3.0) -> bool:
        return self.max_ratio <= ratio_tol and self.slope < slope_tol


def decay_check(phi=None, mu: SpectralParams = MU0, eps: float = 0.0, factor: float = 20.0, points: int = 12) -> DecayReport:
    """|Phi^+-| on y = xX in [X^eps (PX)^3, factor X^eps (PX)^3], against (PX)^3 and its log-log slope."""
    w = phi or TestFunction()
    X = _weight_X(w)
    PX3 = _PX(w) ** 3
    y0 = X**eps * PX3
    ys = np.geomspace(y0, factor * y0, points)
    xs = ys / X
    pp, pm = phi_pm(xs, mu, w)
    v = np.maximum(np.abs(pp), np.abs(pm))
    slope = float(np.polyfit(np.log(xs), np.log(v), 1)[0])
    return DecayReport(y0, ys, v, PX3, float(np.max(v) / PX3), slope)


def small_x_sweep(X: float = 1e4, eps: float = 0.25, points: int = 24, mu: SpectralParams = MU0, y_min: float = 1e-2):
    """max |Phi^+-(x)| / (P X^{1+eps}) over x X in [y_min, X^eps], phi the bump on [X/2, X]."""
    from .reports import reduce_records

    w = TestFunction(scale=X)
    P = w.P
    ys = np.geomspace(y_min, X**eps, points)
    pp, pm = phi_pm(ys / X, mu, w)
    recs = []
    for y, a, b in zip(ys, pp, pm):
        r = max(abs(a), abs(b)) / (P * X ** (1 + eps))
        recs.append({"ratio": float(r), "params": {"y": float(y), "X": X, "eps": eps}})
    return reduce_records(recs, "max|Phi+-| / (P X^(1+eps))")


def tau3_majorant(n2: np.ndarray, n1: int) -> np.ndarray:
    """tau_3(n1) tau_3(n2), a majorant profile for |A(n2, n1)| in the mu = 0 setting."""
    from .arith import tau3, tau_k_table

    n2 = np.asarray(n2, dtype=np.int64)
    tab = tau_k_table(int(n2.max()) if n2.size else 1, 3)
    return tau3(n1) * tab[n2].astype(float)


SPLINE_TOL = 1e-5
EXACT_N2 = 256


def _abs_profile(f, lo: float, hi: float, tol: float = SPLINE_TOL, per_decade: int = 40, max_rounds: int = 8):
    """Cubic spline of log|f| in log y on [lo, hi], refined until midpoints agree to tol.

    f maps an array of y to an array of nonnegative values. Returns (spline, error)
    where error is the worst relative midpoint deviation at the last check.
    """
    from scipy.interpolate import CubicSpline

    n = max(8, int(per_decade * math.log10(hi / lo)) + 1)
    ly = np.linspace(math.log(lo), math.log(hi), n)
    with np.errstate(divide="ignore"):
        lv = np.log(np.maximum(f(np.exp(ly)), 1e-300))
    err = np.inf
    for _ in range(max_rounds):
        cs = CubicSpline(ly, lv)
        mid = 0.5 * (ly[1:] + ly[:-1])
        lm = np.log(np.maximum(f(np.exp(mid)), 1e-300))
        dev = np.abs(np.expm1(cs(mid) - lm))
        # values far below the peak cannot matter to the sum
        dev = np.where(lm < lv.max() - 40.0, 0.0, dev)
        err = float(dev.max())
        ly = np.concatenate([ly, mid])
        lv = np.concatenate([lv, lm])
        order = np.argsort(ly)
        ly, lv = ly[order], lv[order]
        if err <= tol:
            break
    return CubicSpline(ly, lv), err


def phibeta_bound_sweep(q: int, n1: int, beta_grid, X: float, h: float = 1.0, eps: float = 0.0,
                        abs_coeff=None, cut: float = 1.0):
    """max over beta of sum_{n2} |A(n2,n1)|/(n1 n2) |Phi_beta^+-(n1^2 n2/q^3)| / (X^eps (1+|beta|X)^2).

    The n2-sum stops at x X = cut X^eps (PX)^3 (1+|beta|X)^3, past which the decay
    of Phi_beta makes the terms negligible; the last retained term is recorded.
    Terms with n2 <= EXACT_N2 use direct evaluations; beyond that |Phi_beta^+-| is
    read off a refined spline in log y, whose certified relative error is recorded.
    """
    from .reports import reduce_records

    abs_coeff = abs_coeff or tau3_majorant
    base = TestFunction()
    recs = []
    for beta in beta_grid:
        beta = float(beta)
        w = TwistedWeight(base, h, X, beta)
        growth = 1.0 + abs(beta) * X
        ycut = cut * X**eps * (base.P * growth) ** 3
        n2max = max(1, int(ycut * q**3 / (n1 * n1 * X)))
        n2 = np.arange(1, n2max + 1)
        xs = n1 * n1 * n2 / q**3
        head = min(n2max, EXACT_N2)
        pp, pm = phi_pm(xs[:head], MU0, w)
        ap, am = np.abs(pp), np.abs(pm)
        spline_err = 0.0
        if n2max > head:
            cache = {}

            def both(x):
                key = x.tobytes()
                if key not in cache:
                    a, b = phi_pm(x, MU0, w)
                    cache[key] = (np.abs(a), np.abs(b))
                return cache[key]

            sp_, ep = _abs_profile(lambda x: both(x)[0], xs[head - 1], xs[-1])
            sm_, em = _abs_profile(lambda x: both(x)[1], xs[head - 1], xs[-1])
            lx = np.log(xs[head:])
            ap = np.concatenate([ap, np.exp(sp_(lx))])
            am = np.concatenate([am, np.exp(sm_(lx))])
            spline_err = max(ep, em)
        c = np.asarray(abs_coeff(n2, n1), dtype=float) / (n1 * n2)
        sp, sm = float(np.sum(c * ap)), float(np.sum(c * am))
        last = float(max(ap[-1], am[-1]) * c[-1])
        ratio = max(sp, sm) / (X**eps * growth**2)
        recs.append({"ratio": ratio, "params": {"q": q, "n1": n1, "beta": beta, "X": X, "h": h,
                                                "n2_max": int(n2max), "last_term": last,
                                                "spline_err": spline_err}})
    return reduce_records(recs, "sum |A|/(n1 n2) |Phi_beta^+-| / (X^eps (1+|beta|X)^2)")


@dataclass
class VoronoiResidual:
    lhs: complex
    rhs: complex
    residual: float
    tail_estimate: float
    n2_max: int


def voronoi_residual(a: int, q: int, coeffs, X: float, N2: int, tail_factor: int = 4) -> VoronoiResidual:
    """Both sides of the GL(3) Voronoi formula with m = 1 and phi the bump on [X/2, X].

    coeffs is a DoubleCoefficients table carrying mu. The dual sum is cut at n2 <= N2;
    the neglected part is estimated from sampled |Phi^+-| on (N2, tail_factor N2].
    This is a consistency diagnostic only.
    """
    from .arith import divisors, inv_mod
    from .coefficients import CoefficientRangeError
    from .expsums import kloosterman

    if math.gcd(a, q) != 1:
        raise ValueError("need gcd(a, q) = 1")
    mu = SpectralParams.from_pair(coeffs.mu1, coeffs.mu2)
    phi = TestFunction(scale=X)
    lo, hi = math.ceil(X / 2), math.floor(X)
    n = np.arange(lo, hi + 1)
    for m in (lo, hi):
        if not coeffs.has(1, int(m)):
            raise CoefficientRangeError(f"coefficient file lacks A(1,{m}) needed for the left side")
    A1 = np.array([coeffs.table.get((1, int(m)), 0j) for m in n])
    lhs = complex(np.sum(A1 * np.exp(2j * math.pi * ((a * n) % q) / q) * phi(n)))
    abar = inv_mod(a, q)
    pref = q * math.pi ** (-2.5) / 4j
    rhs = 0j
    tail = 0.0
    amax = coeffs.max_abs()
    for n1 in divisors(q):
        c = q // n1
        n2 = np.arange(1, N2 + 1)
        Ap = np.array([coeffs.table.get((int(k), n1), 0j) for k in n2])
        Am = np.array([coeffs.table.get((n1, int(k)), 0j) for k in n2])
        if not (np.any(Ap) or np.any(Am)):
            continue
        for k in n2:
            if not (coeffs.has(int(k), n1) and coeffs.has(n1, int(k))):
                raise CoefficientRangeError(f"coefficient file lacks A({k},{n1}) or A({n1},{k})")
        xs = n1 * n1 * n2 / q**3
        pp, pm = phi_pm(xs, mu, phi)
        Sp = np.array([kloosterman(abar, int(k), c) for k in n2])
        Sm = np.array([kloosterman(abar, -int(k), c) for k in n2])
        rhs += pref * np.sum(Ap / (n1 * n2) * Sp * pp + Am / (n1 * n2) * Sm * pm)
        ext = np.unique(np.geomspace(N2 + 1, tail_factor * N2, 16).astype(int))
        tp, tm = phi_pm(n1 * n1 * ext / q**3, mu, phi)
        env = np.maximum(np.abs(tp), np.abs(tm)) / ext
        tail += abs(pref) * amax * c / n1 * float(np.trapezoid(env, ext)) * 2
    return VoronoiResidual(lhs, complex(rhs), abs(lhs - rhs), tail, N2)
