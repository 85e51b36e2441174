"""Command-line entry point: ``timoshenko-lab <subcommand> [options]``."""
from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .config import SUBCOMMANDS, RunConfig, emit_config, parse_config
from .errors import (
    MeanConditionViolated,
    ParseError,
    TimoshenkoError,
    UnknownGenerator,
    ValidationError,
)
from .norms_rates import CutoffFamily, I_func, fit_power_law
from .reports import ReportRecord, digest, emit_reports
from .semilinear import linearized_rate_check, semilinear_result, solve_semilinear
from .spectral_core import initial_data_transform, ode_oracle, solve_linear, solve_quartic, vieta_errors

OUTPUT_ENV = "TIMOSHENKO_OUTPUT_DIR"

EXIT_PASS, EXIT_BAND, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

INF = math.inf


def experiment_config(cfg: RunConfig) -> ex.ExperimentConfig:
    t, g = cfg.values["time"], cfg.values["grid"]
    return ex.ExperimentConfig(
        a=cfg.a,
        data=cfg.initial_data,
        window=(t["t0"], t["t1"]),
        n_times=t["n_times"],
        density=g["density"],
        xi_max=g["xi_max"],
        check=cfg.subcommand,
    )


def _record(cfg: RunConfig, name: str, columns, rows) -> ReportRecord:
    return ReportRecord(name, digest(emit_config(cfg)), tuple(columns), [list(r) for r in rows])


def _from_result(cfg: RunConfig, res: ex.ExperimentResult, columns) -> ReportRecord:
    """Table from ``res.series`` (column names map to series keys) plus band checks."""
    rows = [[float(t)] + [float(res.series[key][i]) for _, key in columns] for i, t in enumerate(res.times)]
    rec = _record(cfg, res.name, ["t"] + [c for c, _ in columns], rows)
    for key, band in res.bands.items():
        r = res.rates.get(key)
        if r is not None:
            rec.add_check(key, r.exponent, band, r.stderr)
        else:
            rec.add_check(key, res.extras.get(key), band)
    for key, r in res.rates.items():
        if key not in res.bands:
            rec.info.setdefault("exponents", {})[key] = {"value": r.exponent, "stderr": r.stderr}
    return rec


# --------------------------------------------------------------------------
# subcommands

def cmd_roots(cfg: RunConfig) -> ReportRecord:
    r = cfg.values["roots"]
    xi = np.geomspace(r["xi_lo"], r["xi_hi"], r["n"])
    q = solve_quartic(cfg.a, xi)
    err = vieta_errors(q).max(axis=0)
    mx = q.max_real_part()
    cols = ("xi", "lam_R1", "lam_I1", "lam_R2", "lam_I2", "vieta_rel_err")
    rows = zip(xi, q.lam_R1, q.lam_I1, q.lam_R2, q.lam_I2, err)
    rec = _record(cfg, "roots", cols, rows)
    rec.add_check("vieta_max", float(err.max()), (0.0, 1e-9))
    rec.add_check("max_real_part", float(mx.max()), (-INF, -1e-300))
    return rec


def cmd_solve_linear(cfg: RunConfig) -> ReportRecord:
    ecfg = experiment_config(cfg)
    a = ecfg.a

    def fields(st, g):
        comp = ex.energy_components(a, st)
        energy = np.sqrt(sum(np.abs(v) ** 2 for v in comp.values()))
        return {
            "norm_w_l2": st.w_hat,
            "norm_w_h2": g.xi**2 * st.w_hat,
            "norm_psi_l2": st.psi_hat,
            "norm_psi_h1": g.xi * st.psi_hat,
            "shear_l2": comp["shear"],
            "energy_l2": energy,
        }

    ts, s = ex._sweep(ecfg, fields)
    cols = ("norm_w_l2", "norm_w_h2", "norm_psi_l2", "norm_psi_h1", "shear_l2", "energy_l2")
    rows = [[float(t)] + [float(s[c][i]) for c in cols] for i, t in enumerate(ts)]
    rec = _record(cfg, "solve-linear", ("t",) + cols, rows)
    # spot check against the ODE oracle at seeded points
    rng = np.random.default_rng(cfg.get("run", "seed"))
    worst = 0.0
    for _ in range(5):
        xi = float(10 ** rng.uniform(-2, 0.7))
        t = float(rng.uniform(0.0, 30.0))
        hats = tuple(np.atleast_1d(h) for h in cfg.initial_data.hats(np.array([xi])))
        st = solve_linear(a, np.array([xi]), hats, t)
        for branch, val in (("w", st.w_hat[0]), ("psi", st.psi_hat[0])):
            ind = initial_data_transform(branch, tuple(h[0] for h in hats), a, xi)
            ref = ode_oracle(ind, a, xi, t, rtol=1e-11)
            worst = max(worst, abs(val - ref) / (1.0 + abs(ref)))
    rec.add_check("oracle_max_error", worst, (0.0, 1e-6))
    return rec


def cmd_rates(cfg: RunConfig) -> ReportRecord:
    mode = cfg.get("run", "mode")
    ecfg = experiment_config(cfg)
    if mode == "growth":
        res = ex.run_growth(ecfg)
        rec = _from_result(cfg, res, [("norm_w_l2", "norm_w_l2"), ("norm_psi_l2", "norm_psi_l2")])
        rec.info["lower_ratio"] = [res.extras["lower_ratio_min"], res.extras["lower_ratio_max"]]
        return rec
    if mode == "zero-mean":
        res = linearized_rate_check(ecfg)
        keys = ("norm_w_l2", "norm_w_h2", "norm_psi_l2", "norm_psi_h1")
        return _from_result(cfg, res, [(k, k) for k in keys])
    ts = ecfg.times
    vals = {k: np.array([I_func(ecfg.a, t, k) for t in ts]) for k in (0, 1, 2)}
    rows = [[float(t)] + [float(vals[k][i]) for k in (0, 1, 2)] for i, t in enumerate(ts)]
    rec = _record(cfg, "oscillatory-integral", ("t", "I_0", "I_1", "I_2"), rows)
    for k in (0, 1, 2):
        r = fit_power_law(ts, vals[k])
        e = (2 * k - 1) / 4
        rec.add_check(f"I{k}_exponent", r.exponent, (e - 0.05, e + 0.05), r.stderr)
    return rec


def cmd_profile_error(cfg: RunConfig) -> ReportRecord:
    res = ex.run_profile_error(experiment_config(cfg))
    return _from_result(cfg, res, [("w_err_l2", "w_err"), ("psi_err_l2", "psi_err"), ("w_pf_l2", "w_pf")])


def cmd_cancellation(cfg: RunConfig) -> ReportRecord:
    res = ex.run_cancellation_energy(experiment_config(cfg))
    cols = [("norm_psi_l2", "psi"), ("shear_l2", "shear"), ("energy_l2", "energy_l2"), ("w_x_l2", "w_x"),
            ("w_t_l2", "w_t"), ("a_psi_x_l2", "a_psi_x"), ("psi_t_l2", "psi_t")]
    return _from_result(cfg, res, cols)


def cmd_regularity_loss(cfg: RunConfig) -> ReportRecord:
    res = ex.run_regularity_loss(cfg.a, cfg.get("regularity", "xis"))
    rows = [[x, float(r)] for x, r in zip(res.extras["xi"], res.series["rate"])]
    rec = _record(cfg, "regularity-loss", ("xi", "envelope_rate"), rows)
    for key, band in res.bands.items():
        rec.add_check(key, res.extras[key], band)
    return rec


def cmd_verify_bounds(cfg: RunConfig) -> ReportRecord:
    b, g = cfg.values["bounds"], cfg.values["grid"]
    res = ex.verify_pointwise_bounds(
        cfg.a,
        cfg.initial_data,
        (b["xi_lo"], b["xi_hi"]),
        (b["t_lo"], b["t_hi"]),
        b["n"],
        cutoff=CutoffFamily(g["eps0"], g["N0"]),
    )
    names = ("i", "ii", "iii", "iv")
    rows = [[k, res.extras["coarse"][k], res.extras["max_" + k], res.extras["growth_" + k]] for k in names]
    rec = _record(cfg, "verify-bounds", ("bound", "max_ratio_coarse", "max_ratio_fine", "relative_growth"), rows)
    for k in names:
        rec.add_check("finite_" + k, res.extras["max_" + k], (0.0, 1e300))
        rec.add_check("growth_" + k, res.extras["growth_" + k], res.bands["growth_" + k])
    return rec


def cmd_semilinear(cfg: RunConfig) -> ReportRecord:
    s = cfg.values["semilinear"]
    run = solve_semilinear(
        cfg.initial_data, p=s["p"], eps=s["eps"], T=s["T"], dt=s["dt"], L=s["L"], N=s["N"], a=cfg.a,
        fit_window=(s["fit_t0"], None),
    )
    res = semilinear_result(run)
    res.series["x_norm_sup"] = np.array(run.monitor.sup)
    keys = ("norm_w_l2", "norm_w_h2", "norm_psi_l2", "norm_psi_h1", "x_norm_sup")
    return _from_result(cfg, res, [(k, k) for k in keys])


COMMANDS = {
    "roots": cmd_roots,
    "solve-linear": cmd_solve_linear,
    "rates": cmd_rates,
    "profile-error": cmd_profile_error,
    "cancellation": cmd_cancellation,
    "regularity-loss": cmd_regularity_loss,
    "verify-bounds": cmd_verify_bounds,
    "semilinear": cmd_semilinear,
}
assert tuple(COMMANDS) == SUBCOMMANDS


# --------------------------------------------------------------------------

def load_config(subcommand: str, path: str | None = None, overrides=()) -> RunConfig:
    """Read ``path`` (optional), apply ``section.key=value`` overrides, parse strictly."""
    text = Path(path).read_text(encoding="utf-8") if path else ""
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParseError(str(exc)) from exc
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ParseError(f"override {item!r} must look like section.key=value")
        lhs, value = item.split("=", 1)
        section, key = lhs.rsplit(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, value)
    if not cp.has_section("run"):
        cp.add_section("run")
    cp.set("run", "subcommand", subcommand)
    lines = []
    for sec in cp.sections():
        lines.append(f"[{sec}]")
        lines += [f"{k} = {v}" for k, v in cp.items(sec)]
    return parse_config("\n".join(lines) + "\n")


def output_dir(cfg: RunConfig, flag: str | None) -> Path:
    if flag:
        return Path(flag)
    env = os.environ.get(OUTPUT_ENV)
    return Path(env) if env else Path(cfg.get("output", "dir"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="timoshenko-lab", description="Numerical experiments for the dissipative Timoshenko system.")
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="sectioned key/value config file")
        s.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override one entry")
        s.add_argument("--out", help=f"output directory (overrides ${OUTPUT_ENV} and [output] dir)")
        s.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.subcommand, args.config, args.set)
    except (ParseError, ValidationError, UnknownGenerator, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.print_config:
        sys.stdout.write(emit_config(cfg))
        return EXIT_PASS
    try:
        rec = COMMANDS[args.subcommand](cfg)
    except MeanConditionViolated as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TimoshenkoError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out = output_dir(cfg, args.out)
    csv_path, json_path = emit_reports([rec], out / f"{args.subcommand}.csv", out / f"{args.subcommand}.json")
    for name, c in rec.checks.items():
        status = "PASS" if c["pass"] else "FAIL"
        print(f"{status} {name} = {c['value']!r} band {c['band']}")
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_PASS if rec.passed else EXIT_BAND


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
