"""Smooth compactly supported weights and their Mellin transforms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.fft import fft, ifft, next_fast_len

MAX_ORDER = 8


def _bump(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    m = (t > 0.5) & (t < 1.0)
    y = t[m]
    out[m] = np.exp(-1.0 / ((y - 0.5) * (1.0 - y)) + 16.0)
    return out


def _bump_jet(y: np.ndarray, order: int) -> np.ndarray:
    """Derivatives 0..order of exp(16 - 1/((y-1/2)(1-y))) at interior points y.

    With g the exponent, f = e^g satisfies f^(n+1) = sum_k C(n,k) g^(k+1) f^(n-k).
    """
    a, b = 0.5, 1.0
    u = 1.0 / (y - a)
    v = 1.0 / (b - y)
    # g = -(u + v)/(b - a); g^(j) = -(1/(b-a)) * j! * ((-1)^j u^(j+1) + v^(j+1))
    g = np.empty((order + 2,) + y.shape)
    for j in range(order + 2):
        g[j] = -math.factorial(j) * ((-1) ** j * u ** (j + 1) + v ** (j + 1)) / (b - a)
    f = np.empty((order + 1,) + y.shape)
    f[0] = np.exp(g[0] + 16.0)
    for n in range(order):
        f[n + 1] = sum(math.comb(n, k) * g[k + 1] * f[n - k] for k in range(n + 1))
    return f


@dataclass(frozen=True)
class TestFunction:
    """The canonical bump exp(16 - 1/((t-1/2)(1-t))) with t = x/scale.

    Supported on [scale/2, scale] with maximum 1 at t = 3/4.
    """

    scale: float = 1.0
    _grid: int = field(default=4001, repr=False, compare=False)

    __test__ = False  # not a pytest class

    @property
    def support(self) -> tuple[float, float]:
        return 0.5 * self.scale, self.scale

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        t = x / self.scale
        return _bump(t)

    def derivative(self, x, j: int):
        if not 0 <= j <= MAX_ORDER:
            raise ValueError(f"derivative order must be in [0, {MAX_ORDER}]")
        x = np.asarray(x, dtype=float)
        t = x / self.scale
        out = np.zeros_like(t)
        m = (t > 0.5) & (t < 1.0)
        if m.any():
            out[m] = _bump_jet(t[m], j)[j] / self.scale**j
        return out

    @cached_property
    def derivative_sups(self) -> tuple[float, ...]:
        """sup |phi^(j)| for j = 0..8, measured on a fine grid of the support."""
        t = np.linspace(0.5, 1.0, self._grid)[1:-1]
        jet = _bump_jet(t, MAX_ORDER)
        return tuple(float(np.max(np.abs(jet[j]))) / self.scale**j for j in range(MAX_ORDER + 1))

    @property
    def P(self) -> float:
        """Smallest P with sup|phi^(j)| <= P^j for 1 <= j <= 8."""
        return max(s ** (1.0 / j) for j, s in enumerate(self.derivative_sups) if j > 0)

    def integral(self) -> float:
        return float(mellin(self, 1.0).real)

    def mellin(self, s, panels: int = 4096):
        return mellin(self, s, panels=panels)


def mellin_transform(f: Callable, s, lo: float, hi: float, panels: int = 4096):
    """int_lo^hi f(u) u^(s-1) du for f vanishing to all orders at both ends.

    Trapezoid rule in v = log u, which converges faster than any power of the
    step for such integrands. s may be an array.
    """
    if not (0 < lo < hi < math.inf):
        raise ValueError("Mellin transform needs compact support inside (0, inf)")
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    v = np.linspace(math.log(lo), math.log(hi), panels + 1)
    dv = v[1] - v[0]
    w = np.asarray(f(np.exp(v)), dtype=complex) * dv
    out = np.empty(s.shape, dtype=complex)
    chunk = max(1, 2_000_000 // len(v))
    flat = s.ravel()
    res = out.ravel()
    for i in range(0, len(flat), chunk):
        res[i : i + chunk] = np.exp(np.outer(flat[i : i + chunk], v)) @ w
    return out if out.size > 1 else out[0]


def mellin(phi: TestFunction, s, panels: int = 4096):
    lo, hi = phi.support
    return mellin_transform(phi, s, lo, hi, panels=panels)


def mellin_error_estimate(phi: TestFunction, s, panels: int = 4096) -> float:
    a = mellin(phi, s, panels)
    b = mellin(phi, s, panels // 2)
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def chirp_dft(x: np.ndarray, n: int, a: float) -> np.ndarray:
    """sum_l x_l e^{-i a m l} for m < n (Bluestein, with the chirp phases a k^2/2 formed in floating point)."""
    N = len(x)
    L = next_fast_len(N + n - 1)
    k = np.arange(max(N, n), dtype=float)
    ch = np.exp(-0.5j * a * (k * k))
    y = np.zeros(L, dtype=complex)
    y[:N] = x * ch[:N]
    h = np.zeros(L, dtype=complex)
    h[:n] = np.conj(ch[:n])
    h[L - N + 1 :] = np.conj(ch[1:N][::-1])
    return ch[:n] * ifft(fft(y) * fft(h))[:n]
