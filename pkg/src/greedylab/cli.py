"""Command-line harness: ``greedylab {pursuit,tga,constants,recursion,replay}``.

Every run writes ``summary.json`` and ``detail.csv`` (plus ``plot.csv`` with
``--plot-data``) under ``--out`` and exits 0 when all of its assertions
pass, 1 when one fails and 2 on a bad configuration.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import constants as gc
from . import kernels
from .errors import GreedyLabError
from .pursuit import (parse_dictionary, relaxation_inequality, run_pga, run_power_rga, run_rga,
                      sample_a1, verify_rate)
from .recursion import alpha_sweep, check_power_bound, extremal_sequence
from .report import Results, emit_report
from .spaces import SpaceSpec, eval_norm, parse_space
from .tga import (best_projection_error, greedy_sum, oversampled_size, sigma_m_oracle)

DEFAULTS = {
    "pursuit": {"algo": "rga", "alpha": 1.0, "dict": "orthonormal:64", "samples": 200,
                "mmax": 128, "seed": 0, "k": 0, "rate_c": None, "rate_alpha": None},
    "recursion": {"A": 4.0, "alphas": "0.25,0.5,0.75,1,1.1,1.5,2", "mmax": 10 ** 6},
    "constants": {"space": "lp:2", "n": 8, "mode": "auto", "samples": 40, "seed": 0,
                  "law": "mixed", "xd": False},
    "tga": {"experiment": "pathologies", "space": "lp:2", "n": 20, "m": 5, "samples": 100,
            "seed": 0, "lambdas": "1.5,2,3"},
    "replay": {},
}
COMMON = {"out": "greedylab-out", "plot_data": False}
TOL = 1e-9


class UsageError(GreedyLabError):
    pass


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GREEDYLAB_THREADS", "1")))
    except ValueError:
        return 1


def _floats(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(t) for t in text]
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


# --- experiments -------------------------------------------------------------------

def _pursuit(cfg: dict, res: Results):
    dic = parse_dictionary(cfg["dict"], seed=int(cfg["seed"]))
    algo, mmax, seed, k = cfg["algo"], int(cfg["mmax"]), int(cfg["seed"]), int(cfg["k"])
    if algo not in ("pga", "rga", "power"):
        raise UsageError(f"unknown algorithm {algo!r}")
    if not 0 <= k <= len(dic):
        raise UsageError(f"k must be in 0..{len(dic)}")

    def one(i):
        kk = k or int(np.random.default_rng([seed, i, 1]).integers(1, len(dic) + 1))
        f, _ = sample_a1(dic, kk, [seed, i])
        if algo == "pga":
            return kk, run_pga(f, dic, mmax, keep_history=False)
        if algo == "rga":
            return kk, run_rga(f, dic, mmax, keep_history=True)
        return kk, run_power_rga(f, dic, mmax, float(cfg["alpha"]), keep_history=True)

    with ThreadPoolExecutor(_threads()) as pool:
        traces = list(pool.map(one, range(int(cfg["samples"]))))

    res.header = ["sample", "m", "atom", "sign", "weight", "residual"]
    worst_recon = 0.0
    max_res = np.zeros(mmax)
    for i, (_, tr) in enumerate(traces):
        for s in tr.steps:
            res.rows.append([i, s.m, s.atom, s.sign, s.weight, s.residual])
            max_res[s.m - 1] = max(max_res[s.m - 1], s.residual)
        worst_recon = max(worst_recon, float(np.abs(tr.approximant + tr.residual - tr.f).max()))
    res.check("dict_pursuit.trace_reconstruction", worst_recon <= TOL, f"max error {worst_recon:.3g}")
    m = np.arange(1, mmax + 1)
    res.plot += [("max_residual", int(j), float(v)) for j, v in zip(m, max_res)]
    summary = {"dictionary_size": len(dic), "d": dic.d, "max_residual_by_m_last": float(max_res[-1])}

    if algo == "pga":
        mono = all(np.all(np.diff(tr.residuals) <= 0) for _, tr in traces)
        res.check("dict_pursuit.pga_monotone", mono)
    else:
        worst_g = max((float(np.linalg.norm(G)) for _, tr in traces for G in tr.history), default=0.0)
        res.check("dict_pursuit.approximant_bound", worst_g <= 1 + TOL, f"max ||G_m|| {worst_g:.12g}")
        summary["max_approximant_norm"] = worst_g
        ineq = max((relaxation_inequality(tr, dic) for _, tr in traces), default=-math.inf)
        res.check("dict_pursuit.relaxation_inequality", ineq <= TOL,
                  f"max <R, G - g> + ||R||^2 = {ineq:.3g}")
        summary["relaxation_inequality_max"] = ineq

    c = cfg["rate_c"]
    ra = cfg["rate_alpha"]
    if algo == "rga":
        c = 2.0 if c is None else c
        ra = 0.5 if ra is None else ra
    if c is not None and ra is not None:
        checks = [verify_rate(tr, float(c), float(ra)) for _, tr in traces if tr.steps]
        bad = [i for i, r in enumerate(checks) if not r.holds]
        worst = max(r.worst_margin for r in checks)
        res.check("dict_pursuit.rate", not bad,
                  f"residual <= {c}/m^{ra}: {len(bad)} violating samples, worst margin {worst:.12g}")
        summary.update({"rate_c": float(c), "rate_alpha": float(ra), "rate_violations": len(bad),
                        "rate_worst_margin": worst})
        res.plot += [("bound", int(j), float(c) / j ** float(ra)) for j in m]
    if algo == "rga":
        ok = all(check_power_bound(tr.residuals ** 2, 4.0, 1.0).holds for _, tr in traces if tr.steps)
        res.check("recursion_lab.rga_consistency", ok, "squared residuals satisfy a_m <= 4/m")
    res.summary = summary


def _recursion(cfg: dict, res: Results):
    A, mmax = float(cfg["A"]), int(cfg["mmax"])
    alphas = _floats(cfg["alphas"])
    rows = alpha_sweep(A, alphas, mmax)
    res.header = ["alpha", "holds", "first_violation", "max_ratio", "m_max"]
    for r in rows:
        res.rows.append([r.alpha, r.holds, r.first_violation, r.max_ratio, r.m_max])
        if r.alpha <= 1:
            res.check("recursion_lab.threshold_dichotomy", r.holds and r.max_ratio <= 1 + 1e-12,
                      f"alpha={r.alpha:g} must satisfy a_m <= A/m^alpha")
        else:
            res.check("recursion_lab.threshold_dichotomy", not r.holds,
                      f"alpha={r.alpha:g} must violate the bound within m_max"
                      + (" (m_max insufficient)" if r.insufficient else ""))
    grid = np.unique(np.geomspace(1, mmax, 200).astype(int))
    for a in alphas:
        seq = extremal_sequence(A, a, mmax)
        res.plot += [(f"alpha={a:g}", int(j), float(seq[j - 1] * j ** a / A)) for j in grid]
    res.summary = {"rows": [r.__dict__ for r in rows]}


def _constants(cfg: dict, res: Results):
    space = parse_space(cfg["space"])
    sc = gc.SampleConfig(int(cfg["n"]), int(cfg["samples"]), int(cfg["seed"]), cfg["law"], cfg["mode"])
    xs = gc.sample_family(sc)
    ests = [gc.unconditionality_estimate(space, sc, xs)]
    prof = gc.democracy_profile(space, sc.n, seed=sc.seed)
    ests.append(prof.delta_d)
    sd = gc.super_democracy_estimate(space, sc)
    ests += [sd, gc.quasi_greedy_estimate(space, sc, xs)]
    if sc.n <= gc.ALMOST_MAX_N:
        ests.append(gc.almost_greedy_estimate(space, sc, xs))
    cheb = sc.n <= gc.GREEDY_MAX_N
    if cheb:
        ests += [gc.greedy_estimate(space, sc, xs), gc.semi_greedy_estimate(space, sc, xs)]

    res.header = ["sample", "greedy_set", "quasi", "almost", "greedy", "semi"]
    chain_ok, count = True, 0
    if sc.n <= gc.ALMOST_MAX_N:
        for i, x in enumerate(xs):
            for r in gc.greedy_type_ratios(space, x, chebyshev=cheb):
                res.rows.append([i, " ".join(map(str, r.A)), r.quasi, r.almost, r.greedy, r.semi])
                # 0/0 ratios (A covers the support) carry no information
                if math.isnan(r.quasi) or math.isnan(r.almost):
                    continue
                count += 1
                chain_ok &= r.quasi <= r.almost
                if cheb and not math.isnan(r.greedy):
                    chain_ok &= r.almost <= r.greedy
        res.check("greedy_constants.chain", chain_ok, f"{count} (x, A) pairs")
    replay_err = max(abs(gc.replay(space, e) - e.value) for e in ests)
    res.check("greedy_constants.witness_replay", replay_err <= TOL, f"max replay error {replay_err:.3g}")
    res.check("greedy_constants.super_democracy_dominates", sd.value >= sd.extras["delta_d"])
    if space.kind == "lp":
        worst = max(abs(e.value - 1.0) for e in ests)
        res.check("greedy_constants.lp_exactness", worst <= TOL, f"max |estimate - 1| {worst:.3g}")
    summary = {"space": space.to_dict(), "estimates": {e.name: e.to_dict() for e in ests},
               "phi_upper": prof.phi_upper[1:], "phi_lower": prof.phi_lower[1:],
               "chain_assertions": count}
    for m in range(1, sc.n + 1):
        res.plot += [("phi_upper", m, float(prof.phi_upper[m])), ("phi_lower", m, float(prof.phi_lower[m]))]
    if cfg.get("xd"):
        rep = gc.xd_comparison(space, sc, samples=xs)
        summary["xd"] = rep.to_dict()
        res.check("greedy_constants.xd_membership", rep.all_in_xd)
        res.check("greedy_constants.xd_perturbation_bound", rep.perturbation_bound_ok,
                  f"worst lhs/rhs {rep.perturbation_worst:.6g}")
    res.summary = summary


def _tga(cfg: dict, res: Results):
    exp = cfg["experiment"]
    if exp == "pathologies":
        _tga_pathologies(cfg, res)
    elif exp == "oracle":
        _tga_oracle(cfg, res)
    elif exp == "oversampling":
        _tga_oversampling(cfg, res)
    else:
        raise UsageError(f"unknown tga experiment {exp!r}")


def _tga_pathologies(cfg, res):
    n, m = int(cfg["n"]), int(cfg["m"])
    if 2 * m > n:
        raise UsageError("pathologies need 2*m <= n")
    A, B = list(range(m)), list(range(m, 2 * m))
    one_A, one_B = np.zeros(n), np.zeros(n)
    one_A[A], one_B[B] = 1.0, 1.0
    res.header = ["example", "k", "distance_input", "distance_A", "distance_B"]
    ok_f = ok_g = True
    for k in (1, 2, 4, 8, 16, 32, 64):
        t = (k * k + 1) / (k * k)
        f = t * one_A + one_B
        g = one_A + t * one_B
        Gf, _ = greedy_sum(f, m)
        Gg, _ = greedy_sum(g, m)
        ok_f &= np.array_equal(Gf, t * one_A)
        ok_g &= np.array_equal(Gg, t * one_B)
        dist = float(np.abs(f - one_A - one_B).max())
        res.rows.append(["f", k, dist, float(np.abs(Gf - one_A).max()), float(np.abs(Gf - one_B).max())])
        res.rows.append(["g", k, dist, float(np.abs(Gg - one_A).max()), float(np.abs(Gg - one_B).max())])
        res.plot += [("f_to_1A", k, float(np.abs(Gf - one_A).max())),
                     ("g_to_1B", k, float(np.abs(Gg - one_B).max()))]
    res.check("tga_engine.discontinuity", ok_f and ok_g,
              "G_m(f_k) = (k^2+1)/k^2 1_A and G_m(g_k) = (k^2+1)/k^2 1_B")
    j = np.arange(1, n + 1, dtype=float)
    tail = np.where(j > m, j ** -3.0, 0.0)
    head = np.where(j <= m, 1.0, 0.0)
    f, g = head + tail, -head + tail
    Gf, _ = greedy_sum(f, m)
    Gg, _ = greedy_sum(g, m)
    Gfg, _ = greedy_sum(f + g, m)
    expect = np.where((j > m) & (j <= 2 * m), 2 * j ** -3.0, 0.0)
    ok = (np.array_equal(Gf, head) and np.array_equal(Gg, -head)
          and np.array_equal(Gfg, expect) and np.any(Gfg != Gf + Gg))
    res.check("tga_engine.nonlinearity", ok, "G_k(f+g) = 2 sum_{j=k+1}^{2k} j^-3 e_j != G_k(f)+G_k(g) = 0")
    res.summary = {"n": n, "m": m, "G_k(f+g)": Gfg, "G_k(f)+G_k(g)": Gf + Gg}


def _tga_oracle(cfg, res):
    space = parse_space(cfg["space"])
    n, m, seed = int(cfg["n"]), int(cfg["m"]), int(cfg["seed"])
    res.header = ["sample", "m", "sigma", "witness_set", "best_projection", "norm"]
    ok = True
    out = []
    for i in range(int(cfg["samples"])):
        x = np.random.default_rng([seed, i]).uniform(-1, 1, n)
        for mm in range(m + 1):
            o = sigma_m_oracle(space, x, mm)
            bpe, _ = best_projection_error(space, x, mm)
            nx = eval_norm(space, x)
            ok &= o.value <= bpe <= nx
            res.rows.append([i, mm, o.value, " ".join(map(str, o.witness_set)), bpe, nx])
            out.append(o.to_dict())
    res.check("tga_engine.oracle_order", ok, "sigma_m <= best projection error <= norm")
    res.summary = {"space": space.to_dict(), "oracles": out}


def _tga_oversampling(cfg, res):
    space = parse_space(cfg["space"])
    n, m = int(cfg["n"]), int(cfg["m"])
    lambdas = _floats(cfg["lambdas"])
    sc = gc.SampleConfig(n, int(cfg["samples"]), int(cfg["seed"]), "mixed")
    ests = gc.oversampling_estimate(space, sc, m, lambdas)
    res.header = ["lambda", "size", "max_ratio"]
    vals = []
    for lam in sorted(ests):
        e = ests[lam]
        res.rows.append([lam, oversampled_size(m, lam), e.value])
        res.plot.append(("max_ratio", lam, e.value))
        vals.append(e.value)
    res.check("tga_engine.oversampling_trend", all(b <= a for a, b in zip(vals, vals[1:])),
              "max ratio is non-increasing in lambda")
    res.summary = {"space": space.to_dict(), "m": m,
                   "estimates": {f"{k:g}": v.to_dict() for k, v in ests.items()}}


def _replay(cfg, res):
    path = cfg.get("file")
    if not path:
        raise UsageError("replay needs a summary.json path")
    with open(path) as fh:
        data = json.load(fh)
    try:
        results = data["results"]
        space = SpaceSpec.from_dict(results["space"])
        ests = results["estimates"]
    except (KeyError, TypeError):
        raise UsageError(f"{path} is not a constants summary") from None
    res.header = ["name", "stored", "replayed", "abs_error"]
    for name in sorted(ests):
        e = gc.ConstantEstimate.from_dict(ests[name])
        v = gc.replay(space, e)
        # stored values were rounded to 12 significant digits
        tol = TOL + 1e-11 * abs(e.value)
        res.rows.append([name, e.value, v, abs(v - e.value)])
        res.check(f"greedy_constants.witness_replay[{name}]", abs(v - e.value) <= tol)
    res.summary = {"file": os.path.abspath(path), "space": space.to_dict()}


EXPERIMENTS = {"pursuit": _pursuit, "recursion": _recursion, "constants": _constants,
               "tga": _tga, "replay": _replay}


def run_experiment(command: str, config: dict) -> Results:
    """Run one experiment; ``config`` overrides the command's defaults."""
    if command not in EXPERIMENTS:
        raise UsageError(f"unknown command {command!r}")
    cfg = dict(DEFAULTS[command])
    unknown = set(config) - set(cfg) - set(COMMON) - {"file", "config"}
    if unknown:
        raise UsageError(f"unknown config keys for {command}: {sorted(unknown)}")
    cfg.update({k: v for k, v in config.items() if k not in COMMON and k != "config"})
    res = Results(command, {k: v for k, v in sorted(cfg.items())})
    EXPERIMENTS[command](cfg, res)
    res.summary.setdefault("backend", kernels.BACKEND)
    return res


# --- argument parsing ---------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="greedylab",
                                 description="Greedy approximation experiments with JSON/CSV reports.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="JSON file with option values; flags override it")
        p.add_argument("--out", help="output directory (default greedylab-out)")
        p.add_argument("--plot-data", dest="plot_data", action="store_true",
                       help="also write long-format plot.csv (series, x, y)")
        return p

    p = add("pursuit", "greedy pursuits (pga, rga, power) on samples of A_1(D)")
    p.add_argument("--algo", choices=["pga", "rga", "power"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--dict", help="orthonormal:D | random:KxD | union:D | file:PATH")
    p.add_argument("--samples", type=int)
    p.add_argument("--mmax", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=int, help="atoms per sample (0: random per sample)")
    p.add_argument("--rate-c", dest="rate_c", type=float)
    p.add_argument("--rate-alpha", dest="rate_alpha", type=float)

    p = add("recursion", "extremal recursion sequences and the power bound")
    p.add_argument("--A", type=float)
    p.add_argument("--alphas")
    p.add_argument("--mmax", type=int)

    p = add("constants", "greedy-type constant estimates for a model space")
    p.add_argument("--space")
    p.add_argument("--n", type=int)
    p.add_argument("--mode", choices=["auto", "exhaustive", "sampled"])
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--law", choices=list(gc.LAWS))
    p.add_argument("--xd", action="store_true", help="add the X_d restriction comparison")
    p.add_argument("--replay", dest="file", help="verify the witnesses of a stored summary instead")

    p = add("tga", "thresholding greedy experiments")
    p.add_argument("--experiment", choices=["pathologies", "oracle", "oversampling"])
    p.add_argument("--space")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--lambdas")

    p = add("replay", "recompute and verify the witnesses of a constants summary.json")
    p.add_argument("file")
    return ap


def main(argv=None) -> int:
    args = vars(_parser().parse_args(argv))
    command = args.pop("command")
    cfg = {}
    try:
        if "config" in args:
            try:
                with open(args["config"]) as fh:
                    cfg = json.load(fh)
            except (OSError, ValueError) as e:
                raise UsageError(f"cannot read config {args['config']}: {e}") from None
            if not isinstance(cfg, dict):
                raise UsageError("config file must hold a JSON object")
        cfg.update(args)
        if command == "constants" and cfg.get("file"):
            command = "replay"
            cfg = {k: v for k, v in cfg.items() if k in ("file", "out", "plot_data", "config")}
        out = cfg.get("out", COMMON["out"])
        plot = bool(cfg.get("plot_data", False))
        res = run_experiment(command, cfg)
    except (GreedyLabError, ValueError, TypeError) as e:
        print(f"greedylab {command}: error: {e}", file=sys.stderr)
        return 2
    try:
        emit_report(res, out, plot)
    except OSError as e:
        print(f"greedylab {command}: error: {e}", file=sys.stderr)
        return 2
    for a in res.assertions:
        if not a.passed:
            print(f"FAILED {a.invariant}: {a.detail}", file=sys.stderr)
    return 0 if res.ok else 1


if __name__ == "__main__":
    sys.exit(main())
