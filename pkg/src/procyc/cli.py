"""Command-line interface: ``procyc {curves,simulate,measure,residuals,validate}``.

Every run resolves its configuration as command defaults, then ``--config``
JSON, then explicit flags, and writes ``<out>.manifest.json`` next to the
output. Passing that manifest back through ``--config`` reproduces the output
byte for byte; the subcommand may then be omitted.
"""
from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__, asymptotics, montecarlo
from .dist import DistributionModel, gaussian, student_t
from .errors import (ConfigError, DegenerateCorrelationError, InputError,
                     InsufficientDataError, ProcycError)
from .estimators import ES_AVG, RISK_KINDS
from .kernels import BACKEND
from .procyclicality import DEFAULT_LEVELS, WindowingPlan, measure, residual_pipeline, risk_at
from .processes import DEFAULT_BURN_IN, GarchParams, SimulationPlan, simulate_garch11, simulate_iid
from .rng import check_seed

COMMANDS = ("curves", "simulate", "measure", "residuals", "validate")
MIN_REPS = 1000

DEFAULTS = {
    "curves": dict(p_start=0.005, p_stop=0.995, p_step=0.005, p=None,
                   risks=["var", "es_chen", "es_avg4", "es_avg50", "expectile"], r=[1, 2],
                   dists=["gaussian", "student:3", "student:4", "student:5", "student:10",
                          "student:40"]),
    "simulate": dict(model="garch", dist="gaussian", n=2520, burn_in=DEFAULT_BURN_IN,
                     omega=0.01, alpha=0.08, beta=0.90, allow_nonstationary=False,
                     start_date="2000-01-03"),
    "measure": dict(input=None, prices=False, risk="var", expectile_dist="gaussian",
                    levels=list(DEFAULT_LEVELS), r=1, window=252, horizon=None, stride=None,
                    losses=False, level=0.95),
    "residuals": dict(input=None, prices=False, fit=False, omega=None, alpha=None, beta=None,
                      burn_in=DEFAULT_BURN_IN, risk="var", expectile_dist="gaussian",
                      levels=list(DEFAULT_LEVELS), r=1, window=252, horizon=None, stride=None,
                      losses=False, level=0.95,
                      models=["gaussian", "student:4", "student:5", "student:6", "student:7"]),
    "validate": dict(reps=20000, checks=[
        dict(type="iid", dist="gaussian", risk="var", r=1, p=0.95, n=500, tolerance=0.03),
        dict(type="iid", dist="gaussian", risk="var", r=2, p=0.95, n=500, tolerance=0.03),
        dict(type="iid", dist="gaussian", risk="es_chen", r=1, p=0.95, n=500, tolerance=0.03),
        dict(type="iid", dist="gaussian", risk="es_chen", r=2, p=0.95, n=500, tolerance=0.03),
        dict(type="garch_decorrelation", dist="gaussian", omega=0.01, alpha=0.08, beta=0.90,
             risk="var", r=1, p=0.95, n=[250, 4000], tolerance=0.05),
    ]),
}

DEFAULT_OUT = {"curves": "curves.csv", "simulate": "series.csv", "measure": "measure.json",
               "residuals": "residuals.json", "validate": "validate.json"}


# -- formatting and parsing ---------------------------------------------------------


def fmt(v) -> str:
    """17-significant-digit round-trip decimal; NaN prints as ``nan``."""
    return format(float(v), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def parse_dist(tag: str) -> DistributionModel:
    """``"gaussian"`` or ``"student:<nu>"``."""
    if tag == "gaussian":
        return gaussian()
    kind, _, nu = str(tag).partition(":")
    if kind == "student" and nu:
        try:
            return student_t(float(nu))
        except ValueError as exc:
            raise ConfigError(f"bad distribution {tag!r}: {exc}") from None
    raise ConfigError(f"distribution must be 'gaussian' or 'student:<nu>', got {tag!r}")


def parse_risk(tag: str):
    """``(kind, k)`` from ``var``, ``es_chen``, ``expectile`` or ``es_avg<k>``."""
    if tag in RISK_KINDS and tag != ES_AVG:
        return tag, None
    if tag.startswith(ES_AVG) and tag[len(ES_AVG):].isdigit():
        return ES_AVG, int(tag[len(ES_AVG):])
    raise ConfigError(f"unknown risk measure {tag!r}")


def read_series(path: str, prices: bool = False):
    """Read a ``date,value`` CSV with header; return ``(dates, values)``.

    A trailing ``sigma`` column, as written by ``simulate``, is ignored. With ``prices`` the values become log returns ``log(p[t+1] / p[t])`` and
    carry the later date.
    """
    dates, values = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        names = None if header is None else [h.strip() for h in header]
        if names not in (["date", "value"], ["date", "value", "sigma"]):
            raise InputError(f"{path}:1: header must be 'date,value', got {header}")
        width = len(names)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise InputError(f"{path}:{lineno}: expected {width} fields, got {len(row)}")
            try:
                dt.date.fromisoformat(row[0].strip())
            except ValueError:
                raise InputError(f"{path}:{lineno}: bad ISO-8601 date {row[0]!r}") from None
            try:
                v = float(row[1])
            except ValueError:
                raise InputError(f"{path}:{lineno}: bad number {row[1]!r}") from None
            if not math.isfinite(v):
                raise InputError(f"{path}:{lineno}: non-finite value {row[1]!r}")
            dates.append(row[0].strip())
            values.append(v)
    x = np.array(values)
    if prices:
        if np.any(x <= 0):
            raise InputError(f"{path}: prices must be positive")
        return dates[1:], np.log(x[1:] / x[:-1])
    return dates, x


def _sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


# -- commands -------------------------------------------------------------------------


def p_grid(cfg) -> list:
    if cfg.get("p") is not None:
        grid = [float(p) for p in cfg["p"]]
    else:
        step = float(cfg["p_step"])
        lo, hi = float(cfg["p_start"]), float(cfg["p_stop"])
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        grid = [round(lo + i * step, 12) for i in range(count)]
    if any(not 0.0 < p < 1.0 for p in grid):
        raise ConfigError("p-grid must lie inside (0, 1)")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("p-grid must be strictly increasing")
    return grid


def cmd_curves(cfg, ctx):
    grid = p_grid(cfg)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "risk", "r", "dist", "nu", "value"])
    issues = []
    for tag in cfg["dists"]:
        dist = parse_dist(tag)
        for risk_tag in cfg["risks"]:
            kind, k = parse_risk(risk_tag)
            for r in cfg["r"]:
                for p in grid:
                    try:
                        value = asymptotics.procyclicality(dist, risk_at(kind, p, k=k,
                                                                         model=dist), int(r))
                    except ProcycError as exc:
                        value = math.nan
                        msg = f"{tag} {risk_tag} r={r}: {exc}"
                        if not issues or issues[-1] != msg:
                            issues.append(msg)
                    w.writerow([fmt(p), risk_tag, int(r), dist.tag,
                                "" if dist.is_gaussian else fmt(dist.nu), fmt(value)])
    _write_text(ctx["out"], buf.getvalue())
    for msg in issues:
        print(f"unsupported: {msg}", file=sys.stderr)
    return 0, {"unsupported": issues}


def cmd_simulate(cfg, ctx):
    dist = parse_dist(cfg["dist"])
    plan = SimulationPlan(int(cfg["n"]), int(cfg["burn_in"]), ctx["seed"], dist)
    dates = np.busday_offset(np.datetime64(cfg["start_date"]), np.arange(plan.n),
                             roll="forward").astype(str)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if cfg["model"] == "iid":
        x = simulate_iid(plan)
        w.writerow(["date", "value"])
        w.writerows([d, fmt(v)] for d, v in zip(dates, x))
    elif cfg["model"] == "garch":
        params = GarchParams(cfg["omega"], cfg["alpha"], cfg["beta"])
        x, sigma = simulate_garch11(params, plan,
                                    allow_nonstationary=bool(cfg["allow_nonstationary"]))
        w.writerow(["date", "value", "sigma"])
        w.writerows([d, fmt(v), fmt(s)] for d, v, s in zip(dates, x, sigma))
    else:
        raise ConfigError(f"model must be 'iid' or 'garch', got {cfg['model']!r}")
    _write_text(ctx["out"], buf.getvalue())
    return 0, {}


def _input(cfg):
    if not cfg.get("input"):
        raise ConfigError("an input CSV is required (--input)")
    return read_series(cfg["input"], bool(cfg["prices"]))


def _plan(cfg) -> WindowingPlan:
    if cfg.get("stride") is None:
        raise ConfigError("the anchor stride must be given explicitly (--stride)")
    return WindowingPlan(int(cfg["window"]), int(cfg["stride"]),
                         None if cfg.get("horizon") is None else int(cfg["horizon"]))


def _risk_cfg(cfg):
    kind, k = parse_risk(cfg["risk"])
    return kind, k, parse_dist(cfg["expectile_dist"])


def cmd_measure(cfg, ctx):
    _, x = _input(cfg)
    plan = _plan(cfg)
    kind, k, emodel = _risk_cfg(cfg)
    rows = []
    for p in cfg["levels"]:
        row = {"p": float(p)}
        try:
            res = measure(x, risk_at(kind, float(p), k=k, model=emodel), int(cfg["r"]), plan,
                          losses=bool(cfg["losses"]), level=float(cfg["level"]))
            row.update(res.as_dict())
        except (DegenerateCorrelationError, InsufficientDataError) as exc:
            row["error"] = {"type": type(exc).__name__, "message": str(exc)}
        rows.append(row)
    report = {"command": "measure", "n_observations": int(x.size), "results": rows}
    _write_text(ctx["out"], dumps(report))
    return 0, {}


def cmd_residuals(cfg, ctx):
    _, x = _input(cfg)
    plan = _plan(cfg)
    kind, k, emodel = _risk_cfg(cfg)
    given = [cfg.get(name) for name in ("omega", "alpha", "beta")]
    if all(v is not None for v in given):
        params = GarchParams(*given)
    elif cfg["fit"]:
        params = None
    else:
        raise ConfigError("GARCH parameters (--omega/--alpha/--beta) or --fit are required")
    report = residual_pipeline(x, params, fit=bool(cfg["fit"]) and params is None,
                               risk_kind=kind, k=k, expectile_model=emodel, r=int(cfg["r"]),
                               plan=plan, levels=[float(p) for p in cfg["levels"]],
                               models=tuple(parse_dist(m) for m in cfg["models"]),
                               burn_in=int(cfg["burn_in"]), level=float(cfg["level"]),
                               losses=bool(cfg["losses"]))
    out = {"command": "residuals", "n_observations": int(x.size)}
    out.update(report.as_dict())
    _write_text(ctx["out"], dumps(out))
    return 0, {}


def _check_seed(seed: int, j: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(j,))
    return int(ss.generate_state(1, np.uint64)[0])


def cmd_validate(cfg, ctx):
    reps = cfg["reps"]
    if isinstance(reps, bool) or int(reps) != reps or reps < MIN_REPS:
        raise InputError(f"validation needs at least {MIN_REPS} replications, got {reps}")
    reps = int(reps)
    rows = []
    for j, chk in enumerate(cfg["checks"]):
        seed = _check_seed(ctx["seed"], j)
        kind, k = parse_risk(chk["risk"])
        dist = parse_dist(chk.get("dist", "gaussian"))
        risk = risk_at(kind, float(chk["p"]), k=k, model=dist)
        r, tol = int(chk["r"]), float(chk["tolerance"])
        if chk["type"] == "iid":
            pairs = montecarlo.iid_pairs(dist, risk, r, int(chk["n"]), reps, seed,
                                         threads=ctx["threads"])
            res = pairs.procyclicality()
            target = asymptotics.procyclicality(dist, risk, r)
            gap = abs(res.correlation - target)
            rows.append(dict(check=chk, mc=res.correlation, target=target, gap=gap,
                             se=montecarlo.correlation_standard_error(res.correlation,
                                                                      res.pair_count),
                             pairs=res.pair_count, passed=bool(gap <= tol)))
        elif chk["type"] == "garch_decorrelation":
            params = GarchParams(chk["omega"], chk["alpha"], chk["beta"])
            mags = []
            for n in chk["n"]:
                pairs = montecarlo.garch_pairs(params, dist, risk, r, int(n), reps, seed,
                                               threads=ctx["threads"])
                mags.append(abs(pairs.forward_correlation()))
            decreasing = all(b < a for a, b in zip(mags, mags[1:]))
            rows.append(dict(check=chk, abs_correlation=mags, gap=mags[-1],
                             se=[montecarlo.correlation_standard_error(m, reps) for m in mags],
                             decreasing=decreasing, passed=bool(decreasing and mags[-1] < tol)))
        else:
            raise ConfigError(f"unknown check type {chk['type']!r}")
    ok = all(row["passed"] for row in rows)
    _write_text(ctx["out"], dumps({"command": "validate", "reps": reps, "passed": ok,
                                   "checks": rows}))
    return (0 if ok else 1), {}


HANDLERS = {"curves": cmd_curves, "simulate": cmd_simulate, "measure": cmd_measure,
            "residuals": cmd_residuals, "validate": cmd_validate}


# -- argument handling ---------------------------------------------------------------


def _write_text(path: str, text: str):
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _csv_floats(s):
    return [float(v) for v in s.split(",")]


def _csv_ints(s):
    return [int(v) for v in s.split(",")]


def _csv_str(s):
    return [v for v in s.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="procyc", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON config or a manifest from a previous run")
    ap.add_argument("--seed", type=int, help="base seed, unsigned 64-bit (default 0)")
    ap.add_argument("--out", help="output path; the manifest goes to <out>.manifest.json")
    ap.add_argument("--threads", type=int, help="worker threads (default: CPU count)")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command")

    def flag(p, name, **kw):
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, default=None, **kw)

    def switch(p, name, help):
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, action="store_const",
                       const=True, default=None, help=help)

    c = sub.add_parser("curves", help="asymptotic pro-cyclicality curves (CSV)")
    flag(c, "p", type=_csv_floats, help="explicit comma-separated p-grid")
    flag(c, "p_start", type=float)
    flag(c, "p_stop", type=float)
    flag(c, "p_step", type=float)
    flag(c, "risks", type=_csv_str, help="e.g. var,es_chen,es_avg4,expectile")
    flag(c, "r", type=_csv_ints, help="dispersion orders, e.g. 1,2")
    flag(c, "dists", type=_csv_str, help="e.g. gaussian,student:5")

    s = sub.add_parser("simulate", help="simulate an iid or GARCH(1,1) series (CSV)")
    flag(s, "model", choices=["iid", "garch"])
    flag(s, "dist", help="gaussian or student:<nu>")
    flag(s, "n", type=int)
    flag(s, "burn_in", type=int)
    for name in ("omega", "alpha", "beta"):
        flag(s, name, type=float)
    switch(s, "allow_nonstationary", "permit alpha + beta >= 1")
    flag(s, "start_date", help="first business-day label (ISO-8601)")

    def windowing(p):
        flag(p, "input", help="CSV with header date,value")
        switch(p, "prices", "input holds prices; use log returns")
        flag(p, "risk", help="var, es_chen, es_avg<k> or expectile")
        flag(p, "expectile_dist", help="model for the expectile level map")
        flag(p, "levels", type=_csv_floats)
        flag(p, "r", type=int, help="dispersion order")
        flag(p, "window", type=int)
        flag(p, "horizon", type=int, help="look-forward gap (default: window)")
        flag(p, "stride", type=int, help="anchor step (required)")
        switch(p, "losses", "negate the series before estimating")
        flag(p, "level", type=float, help="confidence level of the Fisher interval")

    m = sub.add_parser("measure", help="sample pro-cyclicality of a series (JSON)")
    windowing(m)

    r = sub.add_parser("residuals", help="pro-cyclicality of GARCH residuals vs iid (JSON)")
    windowing(r)
    switch(r, "fit", "fit GARCH(1,1) by QMLE instead of taking parameters")
    for name in ("omega", "alpha", "beta"):
        flag(r, name, type=float)
    flag(r, "burn_in", type=int)
    flag(r, "models", type=_csv_str, help="iid models for the bands")

    v = sub.add_parser("validate", help="Monte Carlo convergence table (JSON)")
    flag(v, "reps", type=int)
    return ap


def resolve(args, file_cfg):
    """Merge defaults, config file and explicit flags into ``(command, cfg, seed)``."""
    command = args.command or file_cfg.get("command")
    if command not in COMMANDS:
        raise ConfigError("no command given and the config names none")
    if file_cfg.get("command") not in (None, command):
        raise ConfigError(f"config is for {file_cfg['command']!r}, not {command!r}")
    cfg = json.loads(json.dumps(DEFAULTS[command]))
    given = file_cfg.get("config", {})
    unknown = set(given) - set(cfg)
    if unknown:
        raise ConfigError(f"unknown {command} config keys: {sorted(unknown)}")
    cfg.update(given)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    seed = args.seed if args.seed is not None else file_cfg.get("seed", 0)
    return command, cfg, seed


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_cfg = {}
        if args.config:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        command, cfg, seed = resolve(args, file_cfg)
        out = args.out or file_cfg.get("out") or DEFAULT_OUT[command]
        threads = args.threads or os.cpu_count() or 1
        if threads < 1:
            raise ConfigError("--threads must be positive")
        ctx = dict(seed=check_seed(seed), out=out, threads=threads)
        code, extra = HANDLERS[command](cfg, ctx)
    except (ProcycError, OSError, json.JSONDecodeError) as exc:
        print(f"procyc: error: {exc}", file=sys.stderr)
        return 2
    manifest = dict(command=command, config=cfg, seed=ctx["seed"], out=out,
                    version=__version__, backend=BACKEND, **extra)
    if cfg.get("input"):
        manifest["input_sha256"] = _sha256(cfg["input"])
    _write_text(out + ".manifest.json", dumps(manifest))
    return code


if __name__ == "__main__":
    sys.exit(main())
