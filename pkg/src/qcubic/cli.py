"""Command-line verification driver.

Subcommands run the numerical suites and write machine-readable reports:

    verify-spectral   closed-form direction spectra, bands, compression ratios
    verify-hessian    finite differences, witnesses, pair-ratio pinch, thirds
    build-operator    sigma sample, cone condition, operator probes, cache
    viscosity-test    one-sided quadratic comparison against the operator
    report            merge suite outputs into report.json + CSV tables

Determinism contract: identical config + seed produce byte-identical JSON
and CSV outputs.  Wall-clock timings therefore go to the console only and
never into files.  Exit code 0 means every check in the invocation passed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, fields, replace

import numpy as np

from .cones import ConeParams, cone_condition
from .cubic import (spectrum_sweep, strata_directions, verify_cor2,
                    direction_spectrum, direction_from, perp_sweep,
                    cubic_roots_check, cor4_check, invariants_mn)
from .elliptic import (build_sigma, OperatorF, zero_level_curve,
                       ellipticity_probe, monotonicity_sweep, viscosity_probe,
                       operator_cone, load_cache, CacheError, GraphError)
from .hessian import (H, hess_w, grad_w, eval_w, witness_sweep,
                      third_derivative_sweep, ratio_bound_estimate,
                      pair_ratio_sweep, RATIO_BOUND, THIRD_DERIVATIVE_BOUND)
from .numdiff import fd_gradient, fd_jacobian
from .sampling import (rng_for, unit_sphere, directions, STREAM_SPECTRAL,
                       STREAM_PERP, STREAM_HESSIAN, STREAM_WITNESS,
                       STREAM_THIRD, STREAM_FDCHECK)

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    seed: int = 42
    tolerance: float | None = None
    lambda_policy: str = "empirical"
    out: str = "qcubic-out"
    # per-suite sample counts (minimums in parentheses are enforced)
    spectral_count: int = 10_000        # random directions (>= 10)
    strata_count: int = 50              # per stratum class (>= 2)
    perp_count: int = 100_000           # compression-ratio samples (>= 100)
    cor4_pairs: int = 200               # growth-bound pairs (>= 2)
    fd_count: int = 1_000               # finite-difference points (>= 10)
    witness_pairs: int = 100_000        # witness pairs (>= 10)
    ratio_pairs: int = 100_000          # pinch-estimate pairs (>= 100)
    third_count: int = 10_000           # third-derivative samples (>= 10)
    sigma_count: int = 500              # graph sample size (>= 2)
    heldout_count: int = 200            # held-out graph points (>= 10)
    heldout_seed: int = 7
    elliptic_trials: int = 400          # slope probes (>= 4)
    monotonicity_trials: int = 2_000    # psd-increment trials (>= 10)
    viscosity_trials: int = 1_000       # one-sided quadratics (>= 2)

    def validate(self):
        mins = dict(spectral_count=10, strata_count=2, perp_count=100,
                    cor4_pairs=2, fd_count=10, witness_pairs=10,
                    ratio_pairs=100, third_count=10, sigma_count=2,
                    heldout_count=10, elliptic_trials=4,
                    monotonicity_trials=10, viscosity_trials=2)
        for name, lo in mins.items():
            if getattr(self, name) < lo:
                raise ValueError("config: %s must be >= %d" % (name, lo))
        if self.lambda_policy not in ("paper", "empirical"):
            raise ValueError("config: lambda_policy must be paper|empirical")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ValueError("config: tolerance must be positive")


def parse_config_file(path: str) -> dict:
    """key = value lines; '#' comments; ints/floats coerced."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError("%s:%d: expected key = value" % (path, lineno))
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            try:
                out[key] = int(val)
            except ValueError:
                try:
                    out[key] = float(val)
                except ValueError:
                    out[key] = val.strip("\"'")
    return out


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        file_vals = parse_config_file(args.config)
        known = {f.name for f in fields(RunConfig)}
        bad = set(file_vals) - known
        if bad:
            raise ValueError("config: unknown keys %s" % sorted(bad))
        cfg = replace(cfg, **file_vals)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.tolerance is not None:
        cfg.tolerance = args.tolerance
    if args.lambda_policy is not None:
        cfg.lambda_policy = args.lambda_policy
    if args.out is not None:
        cfg.out = args.out
    if getattr(args, "count", None) is not None:
        # --count steers the invoked suite's headline sample size
        cmd = args.command
        if cmd == "verify-spectral":
            cfg.spectral_count = args.count
        elif cmd == "verify-hessian":
            cfg.witness_pairs = cfg.ratio_pairs = args.count
        elif cmd == "build-operator":
            cfg.sigma_count = args.count
        elif cmd == "viscosity-test":
            cfg.viscosity_trials = args.count
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# serialization helpers


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _write_json(path: str, obj) -> None:
    text = json.dumps(_plain(obj), sort_keys=True, indent=2)
    with open(path, "w") as fh:
        fh.write(text)
        fh.write("\n")


def _check(name: str, passed: bool, worst, witness=None) -> dict:
    entry = {"name": name, "passed": bool(passed), "worst": _plain(worst)}
    if not passed and witness is not None:
        entry["witness"] = _plain(witness)
    return entry


def _suite_report(name: str, cfg: RunConfig, checks: list, constants: dict,
                  extra: dict | None = None) -> dict:
    rep = {
        "schema_version": SCHEMA_VERSION,
        "suite": name,
        "seed": cfg.seed,
        "lambda_policy": cfg.lambda_policy,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
        "constants": _plain(constants),
    }
    if extra:
        rep.update(_plain(extra))
    return rep


# ---------------------------------------------------------------------------
# suites


def spectral_suite(cfg: RunConfig) -> dict:
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-8
    checks = []

    dirs = directions(rng_for(cfg.seed, STREAM_SPECTRAL), cfg.spectral_count)
    strata = strata_directions(rng_for(cfg.seed, STREAM_SPECTRAL + 100),
                               cfg.strata_count)
    vals_r, closed_r = spectrum_sweep(dirs)
    vals_s, closed_s = spectrum_sweep(strata)
    err_r = np.max(np.abs(vals_r - closed_r), axis=1)
    err_s = np.max(np.abs(vals_s - closed_s), axis=1)
    worst = float(max(err_r.max(), err_s.max()))
    wit_idx = int(np.argmax(err_r)) if err_r.max() >= err_s.max() \
        else -1 - int(np.argmax(err_s))
    checks.append(_check("closed_form_spectrum", worst <= tol, worst,
                         witness={"index": wit_idx,
                                  "direction": (dirs[wit_idx] if wit_idx >= 0
                                                else strata[-1 - wit_idx])}))

    band_tol = 1e-9
    lam = np.concatenate([vals_r, vals_s])
    slack = np.min(np.stack([
        2.0 + band_tol - lam[:, 0], lam[:, 3] - 1.0 + band_tol,
        -1.0 + band_tol - lam[:, 8], lam[:, 11] + 2.0 + band_tol,
        lam[:, 0] - np.sqrt(3.0) + band_tol,
        -np.sqrt(3.0) + band_tol - lam[:, 11]]), axis=0)
    k = int(np.argmin(slack))
    checks.append(_check("eigenvalue_bands", bool(np.all(slack >= 0)),
                         float(slack.min()), witness={"index": k}))

    # per-direction reference path (reference solver + band report)
    worst_report = np.inf
    for d in dirs[:8]:
        res = verify_cor2(direction_spectrum(direction_from(d)))
        worst_report = min(worst_report, res["worst_slack"])
    checks.append(_check("band_report_path", worst_report >= 0.0,
                         float(worst_report)))

    pd = perp_sweep(directions(rng_for(cfg.seed, STREAM_PERP), cfg.perp_count))
    ratios = np.maximum(pd[:, 2] / pd[:, 0], pd[:, 3] / pd[:, 1])
    delta_hat = float(np.max(ratios))
    checks.append(_check("compression_ratio", delta_hat < 1.5, delta_hat,
                         witness={"index": int(np.argmax(ratios))}))

    grid = np.linspace(-1.0, 1.0, 41)
    lemma_err = 0.0
    for m in grid:
        r = cubic_roots_check(float(m))
        lemma_err = max(lemma_err, float(np.max(np.abs(r**3 - 3 * r - 2 * m))))
    checks.append(_check("depressed_cubic_roots", lemma_err <= 1e-12, lemma_err))

    rng4 = rng_for(cfg.seed, STREAM_SPECTRAL + 200)
    pts = unit_sphere(rng4, 2 * cfg.cor4_pairs) * np.sqrt(3.0)
    worst4 = np.inf
    wit4 = None
    for i in range(cfg.cor4_pairs):
        u, v = pts[2 * i], pts[2 * i + 1]
        if np.linalg.norm(u - v) < 1e-6:
            continue
        res = cor4_check(u, v)
        lo = min(res["lower_slack"], res["upper_slack"])
        if lo < worst4:
            worst4, wit4 = lo, i
    checks.append(_check("growth_bound", worst4 >= -1e-9, float(worst4),
                         witness={"pair_index": wit4}))

    m_s, n_s, t_s = invariants_mn(dirs[:16])
    sample = np.concatenate([np.asarray(m_s, dtype=float)[:, None],
                             np.asarray(n_s, dtype=float)[:, None],
                             closed_r[:16]], axis=1)
    return _suite_report(
        "spectral", cfg, checks,
        {"delta_hat": delta_hat, "spectrum_tolerance": tol,
         "max_spectrum_mismatch": worst},
        extra={"eigen_sample": sample,
               "counts": {"directions": cfg.spectral_count,
                          "strata": int(strata.shape[0]),
                          "perp": cfg.perp_count}})


def hessian_suite(cfg: RunConfig) -> dict:
    fd_tol = cfg.tolerance if cfg.tolerance is not None else 1e-6
    checks = []

    rng = rng_for(cfg.seed, STREAM_FDCHECK)
    pts = unit_sphere(rng, cfg.fd_count) * rng.uniform(0.5, 2.0, (cfg.fd_count, 1))
    worst_g = worst_h = 0.0
    for x in pts:
        g = grad_w(x)
        gf = fd_gradient(eval_w, x)
        worst_g = max(worst_g, float(np.max(np.abs(g - gf)) / max(1.0, np.max(np.abs(g)))))
        hm = hess_w(x)
        hf = fd_jacobian(grad_w, x)
        worst_h = max(worst_h, float(np.max(np.abs(hm - 0.5 * (hf + hf.T)))
                                     / max(1.0, np.max(np.abs(hm)))))
    checks.append(_check("fd_gradient", worst_g < fd_tol, worst_g))
    checks.append(_check("fd_hessian", worst_h < fd_tol, worst_h))

    rngw = rng_for(cfg.seed, STREAM_WITNESS)
    worst_w = np.inf
    done = 0
    while done < cfg.witness_pairs:
        k = min(20_000, cfg.witness_pairs - done)
        a = unit_sphere(rngw, k)
        b = unit_sphere(rngw, k)
        keep = np.linalg.norm(a - b, axis=1) >= 1e-6
        top, bot = witness_sweep(a[keep], b[keep])
        worst_w = min(worst_w, float(top.min()), float(bot.min()))
        done += k
    checks.append(_check("witness_slopes", worst_w >= -1e-9, float(worst_w)))

    m_hat, r_min, r_max = ratio_bound_estimate(
        rng_for(cfg.seed, STREAM_HESSIAN), cfg.ratio_pairs)
    anti = unit_sphere(rng_for(cfg.seed, STREAM_HESSIAN + 300), 500)
    anti_data = pair_ratio_sweep(anti, -anti)
    r_min = min(r_min, float(anti_data[:, 2].min()))
    r_max = max(r_max, float(anti_data[:, 2].max()))
    m_hat = max(m_hat, r_max, 1.0 / r_min)
    checks.append(_check(
        "pair_ratio_pinch",
        r_max <= RATIO_BOUND and r_min >= 1.0 / RATIO_BOUND,
        {"r_min": r_min, "r_max": r_max}))

    thirds = third_derivative_sweep(rng_for(cfg.seed, STREAM_THIRD),
                                    cfg.third_count)
    t_max = float(np.max(thirds))
    checks.append(_check("third_derivative",
                         t_max <= THIRD_DERIVATIVE_BOUND + 1e-3, t_max))

    edges = np.linspace(0.0, 3.5, 71)
    sample_pairs = min(cfg.ratio_pairs, 20_000)
    aa = unit_sphere(rng_for(cfg.seed, STREAM_HESSIAN + 301), sample_pairs)
    bb = unit_sphere(rng_for(cfg.seed, STREAM_HESSIAN + 302), sample_pairs)
    keep = np.linalg.norm(aa - bb, axis=1) >= 1e-9
    hist, _ = np.histogram(pair_ratio_sweep(aa[keep], bb[keep])[:, 2], bins=edges)
    return _suite_report(
        "hessian", cfg, checks,
        {"M_hat": m_hat, "ratio_min": r_min, "ratio_max": r_max,
         "third_max": t_max, "ratio_bound": float(RATIO_BOUND),
         "fd_tolerance": fd_tol},
        extra={"ratio_hist": {"edges": edges, "counts": hist},
               "counts": {"fd": cfg.fd_count, "witness": cfg.witness_pairs,
                          "ratio": cfg.ratio_pairs, "third": cfg.third_count}})


def operator_suite(cfg: RunConfig) -> dict:
    checks = []
    m_hat, _, _ = ratio_bound_estimate(rng_for(cfg.seed, STREAM_HESSIAN),
                                       min(cfg.ratio_pairs, 100_000))
    cone = operator_cone(cfg.lambda_policy,
                         None if cfg.lambda_policy == "paper" else m_hat)

    sigma = build_sigma(cfg.sigma_count, cfg.seed, cone,
                        cache_path=os.path.join(cfg.out, "sigma.cache"))
    mats = np.stack([H(a) for a in sigma.sources[:min(500, sigma.count)]])
    for label, lam in (("policy", cone.lam), ("paper", 11.0 * RATIO_BOUND)):
        rep = cone_condition(mats, ConeParams(lam))
        checks.append(_check("cone_condition_" + label, rep.passed,
                             {"pairs": rep.pairs_checked,
                              "violations": len(rep.violations)},
                             witness={"pairs": rep.violations[:8]}))

    counts = sorted({max(2, cfg.sigma_count // 8), max(2, cfg.sigma_count // 4),
                     max(2, cfg.sigma_count // 2), cfg.sigma_count})
    zl = zero_level_curve(sigma, cone, counts=counts,
                          heldout_count=cfg.heldout_count,
                          heldout_seed=cfg.heldout_seed)
    checks.append(_check("zero_level_bound", zl.worst_ratio <= 5.0,
                         zl.worst_ratio,
                         witness={"index": int(np.argmax(np.abs(zl.F_full) / zl.nn_bound))}))
    checks.append(_check("zero_level_monotone", zl.monotone, zl.max_abs_F))

    op = OperatorF(sigma, cone)
    er = ellipticity_probe(op, cfg.elliptic_trials, cfg.seed)
    checks.append(_check("ellipticity_slopes",
                         er.monotone_worst >= -1e-9 and er.slope_min >= -1e-9,
                         {"slope_min": er.slope_min, "slope_max": er.slope_max,
                          "identity_slope": er.identity_slope}))
    checks.append(_check("level_set_cone", not er.level_violations,
                         {"pairs": er.level_pairs,
                          "violations": len(er.level_violations)},
                         witness={"pairs": er.level_violations[:8]}))

    mono_worst = monotonicity_sweep(op, cfg.monotonicity_trials, cfg.seed + 1)
    checks.append(_check("degenerate_ellipticity", mono_worst >= -1e-9,
                         mono_worst))

    vr = viscosity_probe(op, max(2, cfg.viscosity_trials // 5), cfg.seed)
    checks.append(_check("viscosity_spot",
                         vr.minorant_violations == 0 and vr.majorant_violations == 0,
                         {"minorant_max_F": vr.minorant_max_F,
                          "majorant_min_F": vr.majorant_min_F}))

    return _suite_report(
        "operator", cfg, checks,
        {"lambda_used": cone.lam, "M_hat": m_hat,
         "Lambda_hat": er.slope_max,
         "Lambda_paper_chain": er.paper_chain_bound,
         "maxF_curve": {"counts": zl.counts, "max_abs_F": zl.max_abs_F}},
        extra={"counts": {"sigma": cfg.sigma_count,
                          "heldout": cfg.heldout_count}})


def viscosity_suite(cfg: RunConfig) -> dict:
    cache = os.path.join(cfg.out, "sigma.cache")
    if os.path.exists(cache):
        sigma = load_cache(cache)
        lam = sigma.lam
        if lam <= 1.0:
            raise CacheError("cached sample has no usable aperture")
        cone = ConeParams(lam)
    else:
        m_hat, _, _ = ratio_bound_estimate(rng_for(cfg.seed, STREAM_HESSIAN),
                                           min(cfg.ratio_pairs, 100_000))
        cone = operator_cone(cfg.lambda_policy,
                             None if cfg.lambda_policy == "paper" else m_hat)
        sigma = build_sigma(cfg.sigma_count, cfg.seed, cone, cache_path=cache)
    op = OperatorF(sigma, cone)
    vr = viscosity_probe(op, cfg.viscosity_trials, cfg.seed)
    checks = [
        _check("minorants", vr.minorant_violations == 0,
               {"max_F": vr.minorant_max_F, "violations": vr.minorant_violations}),
        _check("majorants", vr.majorant_violations == 0,
               {"min_F": vr.majorant_min_F, "violations": vr.majorant_violations}),
    ]
    return _suite_report(
        "viscosity", cfg, checks,
        {"minorant_max_F": vr.minorant_max_F,
         "majorant_min_F": vr.majorant_min_F,
         "trials": vr.trials, "margin": vr.margin,
         "lambda_used": cone.lam})


# ---------------------------------------------------------------------------
# report merging


def _cell(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write_csv(path: str, header: list, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def report_cmd(cfg: RunConfig) -> int:
    need = ["spectral", "hessian", "operator"]
    suites = {}
    for name in need + ["viscosity"]:
        path = os.path.join(cfg.out, name + ".json")
        if os.path.exists(path):
            with open(path) as fh:
                suites[name] = json.load(fh)
    missing = [n for n in need if n not in suites]
    if missing:
        print("report: missing suite outputs: %s (run the verify/build "
              "commands first)" % ", ".join(missing), file=sys.stderr)
        return 2

    constants = {
        "delta_hat": suites["spectral"]["constants"]["delta_hat"],
        "M_hat": suites["hessian"]["constants"]["M_hat"],
        "ratio_min": suites["hessian"]["constants"]["ratio_min"],
        "third_max": suites["hessian"]["constants"]["third_max"],
        "Lambda_hat": suites["operator"]["constants"]["Lambda_hat"],
        "Lambda_paper_chain": suites["operator"]["constants"]["Lambda_paper_chain"],
        "lambda_used": suites["operator"]["constants"]["lambda_used"],
        "maxF_curve": suites["operator"]["constants"]["maxF_curve"],
    }
    if "viscosity" in suites:
        constants["minorant_max_F"] = suites["viscosity"]["constants"]["minorant_max_F"]
        constants["majorant_min_F"] = suites["viscosity"]["constants"]["majorant_min_F"]
    merged = {
        "schema_version": SCHEMA_VERSION,
        "passed": all(s["passed"] for s in suites.values()),
        "suites": {k: {"passed": v["passed"],
                       "checks": [{"name": c["name"], "passed": c["passed"]}
                                  for c in v["checks"]]}
                   for k, v in suites.items()},
        "constants": constants,
    }
    _write_json(os.path.join(cfg.out, "report.json"), merged)

    tables = os.path.join(cfg.out, "tables")
    os.makedirs(tables, exist_ok=True)
    sample = suites["spectral"]["eigen_sample"]
    _write_csv(os.path.join(tables, "eigenvalues.csv"),
               ["m", "n"] + ["l%d" % (i + 1) for i in range(12)], sample)
    hist = suites["hessian"]["ratio_hist"]
    rows = [(0.5 * (hist["edges"][i] + hist["edges"][i + 1]), hist["counts"][i])
            for i in range(len(hist["counts"]))]
    _write_csv(os.path.join(tables, "ratio_hist.csv"),
               ["ratio_bin_center", "count"], rows)
    curve = constants["maxF_curve"]
    _write_csv(os.path.join(tables, "maxF_curve.csv"),
               ["sample_count", "max_abs_F"],
               zip(curve["counts"], curve["max_abs_F"]))
    print("report: %s" % ("PASS" if merged["passed"] else "FAIL"))
    return 0 if merged["passed"] else 1


# ---------------------------------------------------------------------------
# entry point


_SUITES = {
    "verify-spectral": ("spectral", spectral_suite),
    "verify-hessian": ("hessian", hessian_suite),
    "build-operator": ("operator", operator_suite),
    "viscosity-test": ("viscosity", viscosity_suite),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qcubic",
        description="Verification suites for the twelve-variable cubic-form "
                    "potential and its Hessian-graph elliptic operator.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(_SUITES) + ["report"]:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--seed", type=int)
        p.add_argument("--count", type=int,
                       help="headline sample count for this suite")
        p.add_argument("--tolerance", type=float)
        p.add_argument("--lambda-policy", dest="lambda_policy",
                       choices=["paper", "empirical"])
        p.add_argument("--out", help="output directory (default qcubic-out)")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args)
    except (ValueError, OSError) as exc:
        print("qcubic: %s" % exc, file=sys.stderr)
        return 2

    os.makedirs(cfg.out, exist_ok=True)
    if args.command == "report":
        return report_cmd(cfg)

    name, fn = _SUITES[args.command]
    t0 = time.time()
    try:
        rep = fn(cfg)
    except (CacheError, GraphError) as exc:
        print("qcubic %s: %s" % (args.command, exc), file=sys.stderr)
        return 2
    _write_json(os.path.join(cfg.out, name + ".json"), rep)
    status = "PASS" if rep["passed"] else "FAIL"
    print("%s: %s (%d checks, %.1fs)" % (args.command, status,
                                         len(rep["checks"]), time.time() - t0))
    for c in rep["checks"]:
        print("  %-28s %s" % (c["name"], "ok" if c["passed"] else
                              "FAIL worst=%r" % (c["worst"],)))
    return 0 if rep["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
