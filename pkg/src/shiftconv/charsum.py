"""The cubic Gauss-Kloosterman character sum and its factorization.

C(b1,b2,b3,n1,n2,h,v;q) = sum over units a mod q of
    e((a h - abar v)/q) G(a,b1;q) G(a,b2;q) G(a,b3;q) S(-abar, n2; q/n1).

Writing q = q' q3 with q' = q1 q2 and q3 = q3' q3'', the sum splits into a
factor modulo q' and one modulo q3, the latter splits again into q3' and
q3'' parts, and the squarefree odd part q3' splits into one factor per
prime. Every factor is an instance of the same twisted block

    B(c; H, V, M, N; k) = sum over units g mod c of
        e((g H - gbar V)/c) prod_i G(g,b_i;c) S(-gbar M, N; k),   k | c,

so the whole cascade is a sequence of parameter twists.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .arith import _inv, divisors, epsilon_q, factor_chain, factorize, inverse_table, is_prime, primes_up_to, unit_mask
from .expsums import gauss_sums_all, kloosterman_all_m, legendre_table, roots_of_unity
from .reports import BoundReport, reduce_records


@dataclass(frozen=True)
class CharSumParams:
    b1: int
    b2: int
    b3: int
    n1: int
    n2: int
    h: int
    v: int
    q: int

    def __post_init__(self):
        if self.q < 1 or self.n1 < 1:
            raise ValueError("q and n1 must be positive")
        if self.q % self.n1:
            raise ValueError(f"n1={self.n1} does not divide q={self.q}")

    @property
    def bs(self) -> tuple[int, int, int]:
        return self.b1, self.b2, self.b3


def _block(c: int, H: int, V: int, M: int, N: int, bs, k: int) -> tuple[complex, float]:
    """(value, sum of |terms|) of the twisted block B(c; H, V, M, N; k)."""
    if c == 1:
        return 1 + 0j, 1.0
    g = np.flatnonzero(unit_mask(c))
    gbar = inverse_table(c)[g]
    term = roots_of_unity(c)[(g * (H % c) - gbar * (V % c)) % c]
    for b in bs:
        G = gauss_sums_all(b, c)[g]
        # for units g, |G(g,b;c)| is 0, sqrt(c) or sqrt(2c): clear FFT noise on the zeros
        G[np.abs(G) < 0.5] = 0
        term = term * G
    # scale: sum of |terms| with the Kloosterman sum opened into its phi(k) unit terms
    scale = float(np.sum(np.abs(term))) * int(np.count_nonzero(unit_mask(k)))
    S = kloosterman_all_m(N, k)
    term = term * S[(-gbar * (M % k)) % k]
    return complex(np.sum(term)), scale


def C_direct(params: CharSumParams, with_scale: bool = False):
    """The defining sum over reduced residues a mod q."""
    p = params
    val, scale = _block(p.q, p.h, p.v, 1, p.n2, p.bs, p.q // p.n1)
    return (val, scale) if with_scale else val


def _chain(params: CharSumParams):
    fc = factor_chain(params.q, params.n1)
    qp = fc.q_prime
    if qp % params.n1:
        raise ValueError("n1 must divide q1*q2")
    return fc, qp, fc.q3, qp // params.n1


def C_split(params: CharSumParams, with_scale: bool = False):
    """(C*, C**) with C* over a1 mod q' and C** over a2 mod q3."""
    p = params
    fc, qp, q3, qhat = _chain(p)
    i3 = _inv(q3, qp)
    cs = _block(qp, p.h * i3 * i3, p.v, q3, p.n2 * _inv(q3, qhat) ** 2, p.bs, qhat)
    ip = _inv(qp, q3)
    css = _block(q3, p.h * ip * ip, p.v, qp, p.n2 * _inv(qhat, q3) ** 2, p.bs, q3)
    if with_scale:
        return cs, css
    return cs[0], css[0]


def _starstar_args(p: CharSumParams):
    fc, qp, q3, qhat = _chain(p)
    ip = _inv(qp, q3)
    # C** parameters before the q3' / q3'' split
    return fc, p.h * ip * ip, qp, p.n2 * _inv(qhat, q3) ** 2


def C_starstar_split(params: CharSumParams, with_scale: bool = False):
    """(C**_1 over q3', C**_2 over q3'')."""
    fc, H, M, N = _starstar_args(params)
    sf, ff = fc.q3_sf, fc.q3_ff
    a, b = _inv(ff, sf), _inv(sf, ff)
    c1 = _block(sf, H * a * a, params.v, M * ff, N * a * a, params.bs, sf)
    c2 = _block(ff, H * b * b, params.v, M * sf, N * b * b, params.bs, ff)
    if with_scale:
        return c1, c2
    return c1[0], c2[0]


@dataclass(frozen=True)
class PrimeFactorArgs:
    p: int
    r1: int
    r2: int
    r3: int
    w: int


def prime_factor_args(params: CharSumParams) -> list[PrimeFactorArgs]:
    """Per-prime twists r1, r2, r3 and w for each p | q3'."""
    p = params
    fc, qp, q3, qhat = _chain(p)
    sf, ff = fc.q3_sf, fc.q3_ff
    sumb2 = sum(b * b for b in p.bs)
    out = []
    for pr, e in factorize(sf).factors:
        if e != 1 or pr == 2:
            raise ValueError("q3' must be odd and squarefree")
        pp = sf // pr
        inv = lambda x: _inv(x, pr)  # noqa: E731
        r1 = inv(qp) ** 2 * inv(ff) ** 2 * inv(pp) ** 2 % pr
        r2 = qp * ff * pp % pr
        r3 = inv(qhat) ** 2 * inv(ff) ** 2 * inv(pp) ** 2 % pr
        w = inv(4) * (4 * p.v + sumb2) % pr
        out.append(PrimeFactorArgs(pr, r1, r2, r3, w))
    return out


def C1_prime_product(params: CharSumParams, with_scale: bool = False):
    """[T(p_i)] for the primes of q3'; their product is C**_1."""
    fc = factor_chain(params.q, params.n1)
    sf = fc.q3_sf
    if any(e > 1 for _, e in factorize(sf).factors) or sf % 2 == 0:
        raise ValueError("q3' must be odd and squarefree")
    out = []
    for a in prime_factor_args(params):
        out.append(_block(a.p, params.h * a.r1, params.v, a.r2, params.n2 * a.r3, params.bs, a.p))
    return out if with_scale else [v for v, _ in out]


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")


def T_tilde(p: int, r1h: int, w: int, r2: int, r3n2: int, with_scale: bool = False):
    """sum over units x mod p of (x/p) e((r1h x - w xbar)/p) S(-r2 xbar, r3n2; p)."""
    _check_odd_prime(p)
    x = np.arange(1, p, dtype=np.int64)
    xb = inverse_table(p)[x]
    S = kloosterman_all_m(r3n2, p)
    term = legendre_table(p)[x] * roots_of_unity(p)[(x * (r1h % p) - xb * (w % p)) % p]
    term = term * S[(-xb * (r2 % p)) % p]
    val = complex(np.sum(term))
    return (val, float((p - 1) ** 2)) if with_scale else val


def T_prime(p: int, h: int, v: int, r1: int, r2: int, r3: int, n2: int, bs) -> complex:
    """The per-prime factor in its Gauss-sum form."""
    _check_odd_prime(p)
    return _block(p, h * r1, v, r2, n2 * r3, bs, p)[0]


def T_from_tilde(p: int, tt: complex) -> complex:
    return epsilon_q(p) ** 3 * p**1.5 * tt


def cascade(params: CharSumParams) -> dict:
    """All levels of the factorization with the deviation of each identity."""
    d, ds = C_direct(params, with_scale=True)
    (cs, s1), (css, s2) = C_split(params, with_scale=True)
    (c1, t1), (c2, t2) = C_starstar_split(params, with_scale=True)
    primes = C1_prime_product(params, with_scale=True)
    prod = complex(np.prod([v for v, _ in primes])) if primes else 1 + 0j
    full = cs * prod * c2
    scale = max(ds, s1 * s2, s1 * t1 * t2, 1.0)
    return {
        "C_direct": d,
        "C_star": cs,
        "C_starstar": css,
        "C1": c1,
        "C2": c2,
        "prime_factors": [v for v, _ in primes],
        "dev_split": abs(d - cs * css) / scale,
        "dev_starstar": abs(css - c1 * c2) / max(s2, t1 * t2, 1.0),
        "dev_primes": abs(c1 - prod) / max(t1, float(np.prod([s for _, s in primes])), 1.0),
        "dev_chain": abs(d - full) / scale,
    }


# ---------------------------------------------------------------- sweeps

LEMMA52_CASES = ("p|h", "p!h,p|n2", "generic")


def _lemma52_item(args):
    p, case, h, n2, w, r1, r2, r3 = args
    tt = T_tilde(p, r1 * h, w, r2, r3 * n2)
    bound = math.sqrt(math.gcd(h, p)) * p
    return {
        "params": {"p": p, "case": case, "h": h, "n2": n2, "w": w, "r1": r1, "r2": r2, "r3": r3},
        "value": tt,
        "bound": bound,
        "ratio": abs(tt) / bound,
    }


def lemma52_items(p_max: int, samples_per_case: int, seed: int) -> list[tuple]:
    if p_max > 2000:
        raise ValueError("p_max must be <= 2000")
    rng = np.random.default_rng(seed)
    items = []
    for p in primes_up_to(p_max):
        if p == 2:
            continue
        for case in LEMMA52_CASES:
            for _ in range(samples_per_case):
                r1, r2, r3 = (int(v) for v in rng.integers(1, p, size=3))
                w = int(rng.integers(0, p))
                k1, k2 = (int(v) for v in rng.integers(1, 10**6, size=2))
                if case == "p|h":
                    h, n2 = p * k1, k2
                    n2 += n2 % p == 0
                elif case == "p!h,p|n2":
                    h, n2 = k1, p * k2
                    h += h % p == 0
                else:
                    h, n2 = k1, k2
                    h += h % p == 0
                    n2 += n2 % p == 0
                items.append((p, case, h, n2, w, r1, r2, r3))
    return items


def _run(fn, items, workers: int | None):
    if workers is not None and workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items, chunksize=max(1, len(items) // (8 * workers))))
    return [fn(it) for it in items]


def lemma52_sweep(p_max: int = 499, samples_per_case: int = 4, seed: int = 1, workers: int | None = None) -> BoundReport:
    """Max of |T~(p)| / ((h,p)^(1/2) p), overall and per proof case."""
    recs = _run(_lemma52_item, lemma52_items(p_max, samples_per_case, seed), workers)
    rep = reduce_records(recs, "|T~(p)| / ((h,p)^(1/2) p)")
    for case in LEMMA52_CASES:
        rep.cases[case] = reduce_records([r for r in recs if r["params"]["case"] == case], rep.bound_formula)
    return rep


def prop33_denominator(params: CharSumParams) -> float:
    fc = factor_chain(params.q, params.n1)
    return (
        float(fc.q1 * fc.q2 * fc.q3_ff) ** 3
        * fc.q3_sf**2.5
        * math.sqrt(math.gcd(params.h, fc.q3_sf))
        / math.sqrt(params.n1)
    )


def _prop33_item(params: CharSumParams):
    val = C_direct(params)
    bound = prop33_denominator(params)
    return {"params": asdict(params), "value": val, "bound": bound, "ratio": abs(val) / bound}


def random_params(q: int, rng: np.random.Generator) -> CharSumParams:
    ds = divisors(q)
    n1 = int(ds[rng.integers(0, len(ds))])
    b1, b2, b3 = (int(v) for v in rng.integers(0, q, size=3))
    n2 = int(rng.integers(-q, q + 1))
    h = int(rng.integers(0, q + 1))
    v = int(rng.integers(-q, q + 1))
    return CharSumParams(b1, b2, b3, n1, n2, h, v, q)


def prop33_items(q_max: int, samples: int, seed: int) -> list[CharSumParams]:
    if q_max > 2000:
        raise ValueError("q_max must be <= 2000")
    rng = np.random.default_rng(seed)
    return [random_params(int(rng.integers(1, q_max + 1)), rng) for _ in range(samples)]


def prop33_sweep(q_max: int = 2000, samples: int = 400, seed: int = 1, workers: int | None = None) -> BoundReport:
    """Max of |C| / ((q1 q2 q3'')^3 q3'^(5/2) (h,q3')^(1/2) n1^(-1/2))."""
    recs = _run(_prop33_item, prop33_items(q_max, samples, seed), workers)
    return reduce_records(recs, "|C| / ((q1q2q3'')^3 q3'^(5/2) (h,q3')^(1/2) n1^(-1/2))")


def composite_items(q_max: int, count: int, seed: int) -> list[CharSumParams]:
    """Random tuples with composite q for the factorization identity suite."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        q = int(rng.integers(4, q_max + 1))
        if is_prime(q):
            continue
        out.append(random_params(q, rng))
    return out


def _verify_item(params: CharSumParams):
    c = cascade(params)
    return {"params": asdict(params), "dev": max(c["dev_split"], c["dev_starstar"], c["dev_primes"], c["dev_chain"])}


def verify_factorization(q_max: int, count: int, seed: int, workers: int | None = None) -> list[dict]:
    return _run(_verify_item, composite_items(q_max, count, seed), workers)


def tilde_identity_items(p_max: int, per_p: int, seed: int) -> list[tuple]:
    rng = np.random.default_rng(seed)
    items = []
    for p in primes_up_to(p_max):
        if p == 2:
            continue
        for _ in range(per_p):
            h, v, n2 = (int(x) for x in rng.integers(-10**4, 10**4, size=3))
            r1, r2, r3 = (int(x) for x in rng.integers(1, p, size=3))
            bs = tuple(int(x) for x in rng.integers(0, p, size=3))
            items.append((p, h, v, r1, r2, r3, n2, bs))
    return items


def _tilde_item(args):
    p, h, v, r1, r2, r3, n2, bs = args
    w = _inv(4, p) * (4 * v + sum(b * b for b in bs)) % p
    direct = T_prime(p, h, v, r1, r2, r3, n2, bs)
    via = T_from_tilde(p, T_tilde(p, r1 * h, w, r2, r3 * n2))
    scale = max(abs(direct), p**1.5 * (p - 1), 1.0)
    return {"params": {"p": p, "h": h, "v": v, "r1": r1, "r2": r2, "r3": r3, "n2": n2, "bs": list(bs)},
            "dev": abs(direct - via) / scale}


def tilde_identity_sweep(p_max: int = 97, per_p: int = 20, seed: int = 1, workers: int | None = None) -> list[dict]:
    """T(p) against eps_p^3 p^(3/2) T~(p) on random tuples; dev is relative to the term scale."""
    return _run(_tilde_item, tilde_identity_items(p_max, per_p, seed), workers)
