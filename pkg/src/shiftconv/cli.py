"""Command-line front end: python -m shiftconv <command> [flags]."""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .reports import GOLDEN_VERSION, check_golden, golden_path, plotdata, to_record_line, write_golden

OUT_DIR_ENV = "SHIFTCONV_OUTPUT_DIR"
EMITS = ("table", "records", "plotdata")


class CheckFailure(Exception):
    """A tolerance or frozen constant was exceeded."""


class UsageError(Exception):
    pass


# Each command: (help, {name: (type, default, help)}, is_sweep)
COMMANDS: dict[str, tuple[str, dict, bool]] = {
    "gauss": ("Gauss sums G(a,b;q); with --q-max, the direct/fast identity suite", {
        "a": (int, 1, "a"), "b": (int, 0, "b"), "q": (int, 7, "modulus"),
        "q_max": (int, 0, "run the identity suite for all q <= q_max"), "tol": (float, 1e-9, "relative tolerance"),
    }, False),
    "kloosterman": ("Kloosterman sum S(m,n;c) and its Weil ratio", {
        "m": (int, 1, "m"), "n": (int, 1, "n"), "c": (int, 7, "modulus"),
    }, False),
    "salie": ("Salie sum modulo an odd prime", {
        "m": (int, 1, "m"), "n": (int, 1, "n"), "p": (int, 7, "odd prime"),
    }, False),
    "rell": ("r_ell(n), the number of representations as a sum of ell squares", {
        "n": (int, 1, "n"), "ell": (int, 3, "number of squares"),
    }, False),
    "charsum-verify": ("factorization identities of the character sum on random composite moduli", {
        "q_max": (int, 2000, "largest modulus"), "count": (int, 200, "number of tuples"),
        "p_max": (int, 97, "largest prime for the T~ identity"), "per_p": (int, 20, "tuples per prime"),
        "tol": (float, 1e-9, "relative tolerance"),
    }, True),
    "lemma52-sweep": ("|T~(p)| / ((h,p)^(1/2) p) over a seeded sweep", {
        "p_max": (int, 499, "largest prime"), "samples": (int, 4, "samples per case and prime"),
    }, True),
    "prop33-sweep": ("normalized character-sum sizes over a seeded sweep", {
        "q_max": (int, 2000, "largest modulus"), "samples": (int, 400, "number of tuples"),
    }, True),
    "farey": ("Farey dissection tiling checks; --samples > 0 adds the seeded major-arc decomposition sweep", {
        "Q": (int, 300, "order"), "all": (int, 0, "1: check every order up to Q"),
        "X": (float, 1e4, "length for the decomposition sweep"), "samples": (int, 0, "decomposition samples"),
    }, False),
    "circle-identity": ("direct shifted sum against int_0^1 F^3 G", {
        "X": (int, 1024, "length"), "h": (int, 3, "shift"), "coeff": (str, "tau3", "tau3, tau, ones, zero"),
        "coeff_file": (str, "", "coefficient file (overrides --coeff)"), "tol": (float, 1e-6, "relative tolerance"),
    }, False),
    "phi-eval": ("Phi_k or Phi^+- at one point", {
        "x": (float, 10.0, "argument (weight on [X/2, X])"), "k": (int, 0, "0, 1, or -1 for the (Phi+, Phi-) pair"),
        "X": (float, 1.0, "weight scale"), "sigma": (float, math.nan, "contour abscissa (default: automatic)"),
        "mu1": (complex, 0j, "mu_1"), "mu2": (complex, 0j, "mu_2"),
        "method": (str, "contour", "contour or asymptotic"), "ell": (int, 3, "asymptotic order"),
    }, False),
    "phi-consistency": ("contour vs asymptotic, sigma shifts, decay and the small-x and Phi_beta sweeps", {
        "points": (int, 20, "log-spaced points in [1e3, 1e5]"), "tol": (float, 1e-3, "relative tolerance"),
        "abs_tol": (float, 1e-6, "absolute tolerance in units of the local scale"),
        "shift_tol": (float, 1e-6, "sigma-shift tolerance"),
        "phibeta_X": (float, 1000.0, "X for the Phi_beta sweep; 0 skips it"), "phibeta_q": (int, 5, "q"),
        "phibeta_betas": (int, 5, "beta grid size"),
    }, True),
    "mainterm": ("tau_3 shifted sum against its main term", {
        "X_list": (str, "1024,2048,4096,8192,16384,32768,65536", "comma separated"),
        "h": (int, 1, "shift"), "q_trunc": (int, 10000, "C_ell truncation"),
        "reading": (str, "corrected", "corrected or literal weights"),
        "max_rel": (float, 0.05, "relative error allowed at the top X"),
        "slope_lo": (float, -0.40, "slope window"), "slope_hi": (float, -0.10, "slope window"),
    }, False),
    "sphere-check": ("lattice points in the ball against (4 pi/3) X^(3/2)", {
        "X": (int, 10**6, "radius squared"), "max_exponent": (float, 0.70, "allowed error exponent"),
    }, False),
    "trend": ("slope of log|S_h(X)| against log X", {
        "X_list": (str, "1024,4096,16384,65536", "comma separated"), "h": (int, 1, "shift"),
        "coeff": (str, "tau3", "tau3, tau, ones"), "coeff_file": (str, "", "coefficient file"),
    }, False),
    "ingest-validate": ("validate a coefficient file", {
        "path": (str, "", "file"), "double": (int, 0, "1: the n1,n2,re,im format"),
    }, False),
}


def _complex(s) -> complex:
    return complex(str(s).replace(" ", "").replace("i", "j"))


def _convert(tp, raw):
    if tp is complex:
        return _complex(raw)
    if tp is int:
        return int(float(raw)) if "e" in str(raw).lower() else int(raw)
    return tp(raw)


def read_config(path) -> dict[str, str]:
    """key = value lines; '#' starts a comment."""
    out = {}
    for no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {no}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shiftconv", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (hlp, params, sweep) in COMMANDS.items():
        p = sub.add_parser(name, help=hlp, description=hlp)
        for key, (tp, default, phelp) in params.items():
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None,
                           help=f"{phelp} (default {default})")
        p.add_argument("--seed", type=int, default=None, help="random seed" + (" (required)" if sweep else ""))
        p.add_argument("--config", default=None, help="key = value file; flags take precedence")
        p.add_argument("--emit", choices=EMITS, default=None, help="output format")
        p.add_argument("--out", default=None, help=f"output file (default: ${OUT_DIR_ENV}/<command>.txt or stdout)")
        p.add_argument("--workers", type=int, default=None, help="worker processes (default: all cores)")
        p.add_argument("--check-golden", action="store_true", help="fail if a frozen constant is exceeded")
        p.add_argument("--write-golden", default=None, metavar="PATH", help="freeze measured constants to PATH")
        p.add_argument("--golden-version", default=GOLDEN_VERSION)
    return ap


def resolve(args: argparse.Namespace) -> dict:
    """Flags over config file over defaults; converted and validated."""
    _, params, sweep = COMMANDS[args.command]
    cfg = read_config(args.config) if args.config else {}
    known = set(params) | {"seed", "emit", "workers", "out"}
    for k in cfg:
        if k not in known:
            raise UsageError(f"config key {k!r} is not a parameter of {args.command}")
    conf = {}
    for key, (tp, default, _) in params.items():
        raw = getattr(args, key)
        src = f"--{key.replace('_', '-')}"
        if raw is None and key in cfg:
            raw, src = cfg[key], f"config key {key}"
        try:
            conf[key] = default if raw is None else _convert(tp, raw)
        except ValueError:
            raise UsageError(f"{src}: cannot read {raw!r} as {tp.__name__}") from None
    seed = args.seed if args.seed is not None else cfg.get("seed")
    if sweep and seed is None:
        raise UsageError(f"--seed is required for {args.command}")
    conf["seed"] = None if seed is None else int(seed)
    conf["emit"] = args.emit or cfg.get("emit", "table")
    if conf["emit"] not in EMITS:
        raise UsageError(f"--emit must be one of {EMITS}")
    workers = args.workers if args.workers is not None else cfg.get("workers")
    conf["workers"] = int(workers) if workers is not None else (os.cpu_count() or 1)
    if conf["workers"] < 1:
        raise UsageError("--workers must be positive")
    conf["out"] = args.out or cfg.get("out")
    return conf


# ---------------------------------------------------------------- commands
# each returns a Result: rows (list of dicts), summary dict, failures, golden-measured dict


class Result:
    def __init__(self, rows=None, summary=None, failures=None, measured=None, notes=None, columns=None):
        self.rows = rows or []
        self.summary = summary or {}
        self.failures = failures or []
        self.measured = measured or {}
        self.notes = notes or {}
        self.columns = columns


def _coeffs(conf, n_max):
    from .coefficients import builtin, ingest_coefficients

    if conf.get("coeff_file"):
        return ingest_coefficients(conf["coeff_file"])
    return builtin(conf["coeff"], n_max)


def _positive(conf, *keys):
    for k in keys:
        if conf[k] < 1:
            raise UsageError(f"--{k.replace('_', '-')} must be positive")


def cmd_gauss(conf):
    from .expsums import gauss_sum_direct, gauss_sum_direct_grid, gauss_sum_fast, gauss_sum_fast_grid

    if conf["q_max"] > 0:
        worst, wq, abs_bad = 0.0, None, 0
        rows = []
        for q in range(1, conf["q_max"] + 1):
            D = gauss_sum_direct_grid(q)
            a, Fg = gauss_sum_fast_grid(q)
            dev = float(np.max(np.abs(D[a] - Fg)) / max(math.sqrt(2 * q), 1.0))
            if q % 2:
                abs_bad += int(np.sum(np.abs(np.abs(Fg[:, 0]) - math.sqrt(q)) > 1e-9 * math.sqrt(q)))
            if dev > worst:
                worst, wq = dev, q
            rows.append({"q": q, "max_rel_dev": dev})
        fails = []
        if worst > conf["tol"]:
            fails.append(f"direct vs fast deviation {worst:.3g} > {conf['tol']} at q={wq}")
        if abs_bad:
            fails.append(f"{abs_bad} odd-q sums G(a,0;q) with |G| != sqrt(q)")
        return Result(rows, {"q_max": conf["q_max"], "max_rel_dev": worst, "worst_q": wq}, fails)
    _positive(conf, "q")
    if math.gcd(conf["a"], conf["q"]) != 1:
        raise UsageError("--a must be coprime to --q")
    d = gauss_sum_direct(conf["a"], conf["b"], conf["q"])
    f = gauss_sum_fast(conf["a"], conf["b"], conf["q"])
    return Result([{"a": conf["a"], "b": conf["b"], "q": conf["q"], "direct": d, "fast": f, "abs": abs(d)}])


def cmd_kloosterman(conf):
    from .arith import tau
    from .expsums import kloosterman

    _positive(conf, "c")
    v = kloosterman(conf["m"], conf["n"], conf["c"])
    g = math.gcd(math.gcd(conf["m"], conf["n"]), conf["c"])
    weil = tau(conf["c"]) * math.sqrt(g) * math.sqrt(conf["c"])
    return Result([{"m": conf["m"], "n": conf["n"], "c": conf["c"], "value": v.real, "weil_ratio": abs(v) / weil}])


def cmd_salie(conf):
    from .expsums import salie

    v = salie(conf["m"], conf["n"], conf["p"])
    return Result([{"m": conf["m"], "n": conf["n"], "p": conf["p"], "value": v, "ratio_2sqrtp": abs(v) / (2 * math.sqrt(conf["p"]))}])


def cmd_rell(conf):
    from .expsums import r_ell

    if conf["n"] < 0 or conf["ell"] < 1:
        raise UsageError("--n must be >= 0 and --ell >= 1")
    return Result([{"value": r_ell(conf["n"], conf["ell"])}], columns=["value"])


def cmd_charsum_verify(conf):
    from .charsum import tilde_identity_sweep, verify_factorization

    recs = verify_factorization(conf["q_max"], conf["count"], conf["seed"], conf["workers"])
    til = tilde_identity_sweep(conf["p_max"], conf["per_p"], conf["seed"], conf["workers"])
    worst = max(recs, key=lambda r: r["dev"])
    wt = max(til, key=lambda r: r["dev"])
    rows = [{"q": r["params"]["q"], "n1": r["params"]["n1"], "dev": r["dev"]} for r in recs]
    summ = {"tuples": len(recs), "max_deviation": worst["dev"], "witness": worst["params"],
            "tilde_tuples": len(til), "tilde_max_deviation": wt["dev"]}
    fails = []
    if worst["dev"] > conf["tol"]:
        fails.append(f"factorization deviation {worst['dev']:.3g} > {conf['tol']} at {worst['params']}")
    if wt["dev"] > conf["tol"]:
        fails.append(f"T~ identity deviation {wt['dev']:.3g} > {conf['tol']} at {wt['params']}")
    return Result(rows, summ, fails)


def cmd_lemma52_sweep(conf):
    from .charsum import lemma52_sweep

    rep = lemma52_sweep(conf["p_max"], conf["samples"], conf["seed"], conf["workers"])
    fails = []
    weil = rep.cases["p|h"].max_ratio
    if weil > 2.0:
        fails.append(f"p|h case ratio {weil:.4g} > 2 at {rep.cases['p|h'].argmax_params}")
    for r in rep.records:
        if r["params"]["case"] == "p!h,p|n2" and r["ratio"] > 2.0 / math.sqrt(r["params"]["p"]) * (1 + 1e-9):
            fails.append(f"Salie case ratio {r['ratio']:.4g} > 2/sqrt(p) at {r['params']}")
            break
    rows = [{"p": r["params"]["p"], "case": r["params"]["case"], "ratio": r["ratio"]} for r in rep.records]
    return Result(rows, rep.summary(), fails, {"lemma52_max_ratio": rep.max_ratio},
                  {"lemma52_max_ratio": f"lemma52-sweep p_max={conf['p_max']} samples={conf['samples']} seed={conf['seed']}"})


def cmd_prop33_sweep(conf):
    from .charsum import prop33_sweep

    rep = prop33_sweep(conf["q_max"], conf["samples"], conf["seed"], conf["workers"])
    rows = [{"q": r["params"]["q"], "n1": r["params"]["n1"], "ratio": r["ratio"]} for r in rep.records]
    return Result(rows, rep.summary(), [], {"prop33_max_ratio": rep.max_ratio},
                  {"prop33_max_ratio": f"prop33-sweep q_max={conf['q_max']} samples={conf['samples']} seed={conf['seed']}"})


def cmd_farey(conf):
    from .circle import decomposition_sweep, farey_check, farey_dissection, psi0_envelope_sweep

    _positive(conf, "Q")
    orders = range(1, conf["Q"] + 1) if conf["all"] else [conf["Q"]]
    rows, fails = [], []
    for Q in orders:
        c = farey_check(farey_dissection(Q), Q)
        rows.append({"Q": Q, "arcs": c["count"], "measure": str(c["measure"]), "gaps": c["gaps"],
                     "congruences": c["congruences"], "ok": c["ok"]})
        if not c["ok"]:
            fails.append(f"Farey tiling failed at Q={Q}: {c}")
    summ = {"orders": len(rows), "all_ok": not fails}
    measured, notes = {}, {}
    if conf["samples"] > 0:
        if conf["seed"] is None:
            raise UsageError("--seed is required for the decomposition sweep (--samples > 0)")
        r1, r2 = decomposition_sweep(conf["X"], conf["samples"], conf["seed"])
        env = psi0_envelope_sweep()
        summ.update({"decomposition_C": r1.max_ratio, "decomposition_argmax": r1.argmax_params,
                     "sum_abs_psi_C": r2.max_ratio, "psi0_envelope": env.max_ratio})
        how = f"farey --X {conf['X']:g} --samples {conf['samples']} --seed {conf['seed']}"
        measured = {"decomposition_C": r1.max_ratio, "sum_abs_psi_C": r2.max_ratio, "psi0_envelope": env.max_ratio}
        notes = {k: how for k in measured}
    return Result(rows, summ, fails, measured, notes)


def cmd_circle_identity(conf):
    from .circle import convolution_via_circle
    from .shifted import direct_sum

    X, h = conf["X"], conf["h"]
    if X < 2:
        raise UsageError("--X must be at least 2")
    if h < 0:
        raise UsageError("--h must be >= 0")
    A = _coeffs(conf, X + h + 1)
    d = direct_sum(X, h, A)
    c = convolution_via_circle(X, h, A)
    rel = abs(c - d) / max(abs(d), 1.0)
    fails = [] if rel <= conf["tol"] else [f"relative difference {rel:.3g} > {conf['tol']} (X={X}, h={h})"]
    return Result([{"X": X, "h": h, "direct": d, "circle": c.real, "circle_imag": c.imag, "rel_diff": rel}],
                  {"rel_diff": rel}, fails)


def cmd_phi_eval(conf):
    from .voronoi import SpectralParams, phi_k_asymptotic, phi_k_contour_detail, phi_pm
    from .weights import TestFunction

    if conf["x"] <= 0 or conf["X"] <= 0:
        raise UsageError("--x and --X must be positive")
    try:
        mu = SpectralParams.from_pair(conf["mu1"], conf["mu2"])
    except ValueError as exc:
        raise UsageError(f"--mu1/--mu2: {exc}") from None
    phi = TestFunction(scale=conf["X"])
    sigma = None if math.isnan(conf["sigma"]) else conf["sigma"]
    x = conf["x"]
    if conf["k"] == -1:
        pp, pm = phi_pm(x, mu, phi, sigma=sigma)
        return Result([{"x": x, "Phi_plus": complex(pp), "Phi_minus": complex(pm)}])
    if conf["k"] not in (0, 1):
        raise UsageError("--k must be 0, 1 or -1")
    if conf["method"] == "asymptotic":
        if x * conf["X"] < 10:
            raise UsageError("--x: asymptotic evaluation needs x X >= 10")
        v = phi_k_asymptotic(x, conf["k"], conf["ell"], phi, mu=mu)
        return Result([{"x": x, "k": conf["k"], "value": complex(v), "method": "asymptotic", "ell": conf["ell"]}])
    if conf["method"] != "contour":
        raise UsageError("--method must be contour or asymptotic")
    try:
        d = phi_k_contour_detail(x, conf["k"], mu, sigma=sigma, phi=phi)
    except ValueError as exc:
        raise UsageError(f"--sigma: {exc}") from None
    return Result([{"x": x, "k": conf["k"], "value": complex(np.ravel(d.value)[0]), "sigma": float(np.ravel(d.sigma)[0]),
                    "T": d.T, "noise": float(np.ravel(d.noise_floor)[0])}])


def phi_consistency(points: int = 20):
    """Rows of the contour/asymptotic comparison on [1e3, 1e5], mu = 0, unit weight."""
    from .voronoi import alternate_sigma, best_sigma, local_scale, phi_k_asymptotic, phi_k_contour

    ys = np.geomspace(1e3, 1e5, points)
    rows = []
    for k in (0, 1):
        for y in ys:
            s1 = float(best_sigma(y, k))
            s2 = alternate_sigma(y, k)
            c1 = complex(phi_k_contour(y, k, sigma=s1))
            c2 = complex(phi_k_contour(y, k, sigma=s2))
            a = complex(phi_k_asymptotic(y, k, 3))
            sc = local_scale(y, k)
            rows.append({"k": k, "x": float(y), "contour": c1, "asymptotic": a, "scale": sc,
                         "rel_dev": abs(c1 - a) / abs(c1), "abs_dev_scaled": abs(c1 - a) / sc,
                         "sigma": s1, "sigma_alt": s2, "shift_rel": abs(c1 - c2) / abs(c1)})
    return rows


def cmd_phi_consistency(conf):
    from .circle import order_Q
    from .voronoi import decay_check, phibeta_bound_sweep, small_x_sweep

    rows = phi_consistency(conf["points"])
    fails = []
    for r in rows:
        if r["rel_dev"] > conf["tol"] and r["abs_dev_scaled"] > conf["abs_tol"]:
            fails.append(f"contour vs asymptotic at x={r['x']:.6g}, k={r['k']}: rel {r['rel_dev']:.3g}")
        if r["shift_rel"] > conf["shift_tol"]:
            fails.append(f"sigma shift {r['sigma']} -> {r['sigma_alt']} moved Phi_{r['k']}({r['x']:.6g}) by {r['shift_rel']:.3g}")
    dec = decay_check()
    if dec.max_ratio > 1e-8:
        fails.append(f"decay: |Phi| / (PX)^3 = {dec.max_ratio:.3g} beyond the threshold")
    if dec.slope > -3:
        fails.append(f"decay: log-log slope {dec.slope:.3g} not below -3")
    small = small_x_sweep()
    summ = {"points": len(rows), "max_rel_dev": max(r["rel_dev"] for r in rows),
            "max_abs_dev_scaled": max(r["abs_dev_scaled"] for r in rows),
            "max_shift_rel": max(r["shift_rel"] for r in rows),
            "decay_max_ratio": dec.max_ratio, "decay_slope": dec.slope, "small_x_C": small.max_ratio}
    measured = {"small_x_C": small.max_ratio}
    how = "phi-consistency (small_x_sweep X=1e4 eps=0.25)"
    notes = {"small_x_C": how}
    if conf["phibeta_X"] > 0:
        X, q = conf["phibeta_X"], conf["phibeta_q"]
        Q = order_Q(X)
        betas = np.linspace(-1.0 / (q * Q), 1.0 / (q * Q), conf["phibeta_betas"])
        pb = phibeta_bound_sweep(q, 1, betas, X)
        summ["phibeta_C"] = pb.max_ratio
        measured["phibeta_C"] = pb.max_ratio
        notes["phibeta_C"] = f"phi-consistency --phibeta-X {X:g} --phibeta-q {q} --phibeta-betas {conf['phibeta_betas']}"
    cols = ["k", "x", "contour", "asymptotic", "rel_dev", "abs_dev_scaled", "sigma", "sigma_alt", "shift_rel"]
    return Result(rows, summ, fails, measured, notes, columns=cols)


def _int_list(s, flag):
    try:
        out = [int(float(v)) for v in str(s).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma separated integers") from None
    if not out:
        raise UsageError(f"{flag}: empty list")
    return out


def cmd_mainterm(conf):
    from .shifted import MAINTERM_WEIGHTS, relative_error_slope, tau3_mainterm_compare

    Xs = _int_list(conf["X_list"], "--X-list")
    if conf["reading"] not in MAINTERM_WEIGHTS:
        raise UsageError("--reading must be corrected or literal")
    if conf["q_trunc"] < 100:
        raise UsageError("--q-trunc must be at least 100")
    if max(Xs) > 2**18:
        raise UsageError("--X-list: X beyond 2^18")
    reps = tau3_mainterm_compare(Xs, conf["h"], q_trunc=conf["q_trunc"], reading=conf["reading"])
    rows = [{"X": r.X, "h": r.h, "S_direct": r.S_direct, "main_term": r.main_term,
             "relative_error": r.relative_error, "literal_ratio": r.main_term_literal / r.S_direct} for r in reps]
    slope = relative_error_slope(reps) if len(reps) > 1 else math.nan
    top = reps[-1]
    summ = {"C": top.constants, "C_tails": top.constant_tails, "I_top": top.integrals,
            "top_relative_error": top.relative_error, "slope": slope, "even_q_share": top.even_q_share}
    fails = []
    if top.relative_error > conf["max_rel"]:
        fails.append(f"relative error {top.relative_error:.3g} > {conf['max_rel']} at X={top.X}")
    if len(reps) > 1 and not conf["slope_lo"] <= slope <= conf["slope_hi"]:
        fails.append(f"slope {slope:.3f} outside [{conf['slope_lo']}, {conf['slope_hi']}]")
    return Result(rows, summ, fails)


def cmd_sphere_check(conf):
    from .shifted import sphere_count_check

    if not 1 <= conf["X"] <= 10**8:
        raise UsageError("--X must be in [1, 1e8]")
    lhs, rhs, ex = sphere_count_check(conf["X"])
    fails = [] if not ex > conf["max_exponent"] else [f"error exponent {ex:.4f} > {conf['max_exponent']}"]
    return Result([{"X": conf["X"], "lhs": lhs, "rhs": rhs, "error_exponent": ex}], {}, fails)


def cmd_trend(conf):
    from .shifted import exponent_trend

    Xs = _int_list(conf["X_list"], "--X-list")
    A = _coeffs(conf, max(Xs) + conf["h"] + 1)
    fit = exponent_trend(Xs, conf["h"], A)
    rows = [{"X": X, "abs_S": v, "residual": r} for X, v, r in zip(fit.X, fit.values, fit.residuals)]
    return Result(rows, {"slope": fit.slope, "intercept": fit.intercept})


def cmd_ingest_validate(conf):
    from .coefficients import ingest_coefficients, ingest_double_coefficients

    if not conf["path"]:
        raise UsageError("--path is required")
    if conf["double"]:
        d = ingest_double_coefficients(conf["path"])
        return Result([{"path": conf["path"], "entries": len(d.table), "mu1": d.mu1, "mu2": d.mu2,
                        "max_abs": d.max_abs()}])
    s = ingest_coefficients(conf["path"])
    return Result([{"path": conf["path"], "n_min": s.n_min, "n_max": s.n_max, "length": len(s.values)}])


HANDLERS = {name: globals()["cmd_" + name.replace("-", "_")] for name in COMMANDS}


# ---------------------------------------------------------------- output


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return f"{v.real:.15g}{v.imag:+.15g}i"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15g}"
    return str(v)


def render(command: str, res: Result, emit: str) -> str:
    cols = res.columns or (list(res.rows[0]) if res.rows else [])
    buf = io.StringIO()
    if emit == "records":
        for r in res.rows:
            buf.write(to_record_line({"command": command, **r}) + "\n")
        if res.summary:
            buf.write(to_record_line({"command": command, "summary": res.summary}) + "\n")
    elif emit == "plotdata":
        header = f"shiftconv {command}\n" + "\n".join(f"{k} = {json.dumps(v, default=_fmt)}" for k, v in res.summary.items())
        rows = []
        for r in res.rows:
            row = []
            for c in cols:
                v = r.get(c)
                row.append(abs(v) if isinstance(v, complex) else (float(v) if isinstance(v, (int, float, np.number)) and not isinstance(v, bool) else _fmt(v)))
            rows.append(row)
        buf.write(plotdata(cols, rows, header))
    else:
        if cols == ["value"] and len(res.rows) == 1 and not res.summary:
            buf.write(_fmt(res.rows[0]["value"]) + "\n")
        else:
            cells = [[_fmt(r.get(c, "")) for c in cols] for r in res.rows]
            widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
            buf.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
            for row in cells:
                buf.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")
            for k, v in res.summary.items():
                buf.write(f"# {k}: {json.dumps(v, default=_fmt, sort_keys=True)}\n")
    return buf.getvalue()


def _destination(command: str, conf: dict):
    if conf["out"]:
        return Path(conf["out"])
    d = os.environ.get(OUT_DIR_ENV)
    if d:
        ext = {"table": "txt", "records": "jsonl", "plotdata": "dat"}[conf["emit"]]
        Path(d).mkdir(parents=True, exist_ok=True)
        return Path(d) / f"{command}.{ext}"
    return None


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        conf = resolve(args)
        res = HANDLERS[args.command](conf)
    except UsageError as exc:
        print(f"shiftconv {args.command}: usage error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, ValueError) as exc:
        print(f"shiftconv {args.command}: {exc}", file=sys.stderr)
        return 2
    if args.check_golden:
        if not res.measured:
            print(f"shiftconv {args.command}: no frozen constants for this configuration", file=sys.stderr)
        res.failures += check_golden(res.measured, args.golden_version)
    if args.write_golden and res.measured:
        write_golden(res.measured, res.notes, args.write_golden)
    text = render(args.command, res, conf["emit"])
    dest = _destination(args.command, conf)
    if dest is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        dest.write_text(text)
    for f in res.failures:
        print(f"FAILED {args.command}: {f}", file=sys.stderr)
    return 1 if res.failures else 0


def main() -> None:
    sys.exit(run())


__all__ = ["run", "main", "golden_path"]
