"""Command-line interface: ``fracpoisson {simulate,estimate,eval,experiment}``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical accuracy error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import AccuracyError, DataError, EstimationError
from .estimate import fit
from .fpp import (
    FppParams,
    LimitLawNu,
    count_pmf,
    interarrival_pdf,
    limit_pdf,
    simulate_alternative_fpp,
    simulate_path,
    survival,
)
from .harness import BUNDLED_SPECS, ExperimentSpec, bundled_spec, report_emit, run_experiment
from .io import fmt_float, format_series, read_series
from .specfun import mittag_leffler, mittag_leffler_two_param
from .stable import StableLaw, UniformSource, stable_pdf

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_ACCURACY = 0, 2, 3, 4

EVAL_FUNCTIONS = ("ml", "ml2", "stable-pdf", "limit-pdf", "interarrival-pdf", "survival", "pmf")


class UsageError(Exception):
    pass


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:steps`` with inclusive endpoints and ``steps`` points."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like start:stop:steps, got {text!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        steps = int(parts[2])
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None
    if steps < 1:
        raise UsageError("grid needs at least one point")
    if steps == 1 and start != stop:
        raise UsageError("a one-point grid needs start == stop")
    return np.linspace(start, stop, steps)


def resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get("FPP_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"FPP_SEED must be an integer, got {env!r}") from None


def _meta(command: str, **kw) -> dict:
    return {"program": "fracpoisson", "version": __version__, "command": command, **kw}


def _write(text: str, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _table(meta: dict, columns, rows, fmt: str) -> str:
    if fmt == "json":
        body = {"meta": meta, "columns": list(columns), "rows": [[float(v) for v in r] for r in rows]}
        return json.dumps(body) + "\n"
    if fmt != "csv":
        raise UsageError(f"format {fmt!r} is not available here (use csv or json)")
    lines = ["# " + json.dumps(meta, sort_keys=True), ",".join(columns)]
    lines += [",".join(fmt_float(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    if (args.n is None) == (args.horizon is None):
        raise UsageError("give exactly one of --n or --horizon")
    p = FppParams(args.nu, args.mu)
    seed = resolve_seed(args.seed)
    rng = UniformSource(seed)
    if args.alt_fpp:
        if args.horizon is None:
            raise UsageError("--alt-fpp needs --horizon")
        grid = parse_grid(args.grid) if args.grid else np.linspace(0.0, args.horizon, 101)
        t, y, _ = simulate_alternative_fpp(p, args.horizon, grid, rng)
        meta = _meta("simulate", nu=p.nu, mu=p.mu, horizon=args.horizon, seed=seed, process="alternative")
        _write(_table(meta, ("t", "y"), zip(t, y), args.format or "csv"), args.out)
        return EXIT_OK
    series = simulate_path(p, rng, n=args.n, horizon=args.horizon)
    meta = _meta("simulate", nu=p.nu, mu=p.mu, seed=seed, emit=args.emit,
                 **({"n": args.n} if args.n is not None else {"horizon": args.horizon}))
    fmt = args.format or "csv"
    if fmt not in ("csv", "jsonl"):
        raise UsageError("simulate writes csv or jsonl")
    _write(format_series(series, fmt, args.emit, meta), args.out)
    return EXIT_OK


def cmd_estimate(args) -> int:
    seed = resolve_seed(args.seed)
    series = read_series(args.input)
    est = fit(series, level=args.level, ci=args.ci, B=args.bootstrap_B, seed=seed)
    meta = _meta("estimate", input=str(args.input), seed=seed)
    fmt = args.format or "json"
    if fmt == "json":
        body = {"meta": meta, **est.to_dict()}
        _write(json.dumps(body, indent=2) + "\n", args.out)
    elif fmt == "csv":
        d = est.to_dict()
        cols = ["nu_hat", "mu_hat", "nu_se", "mu_se", "nu_ci_lo", "nu_ci_hi", "mu_ci_lo", "mu_ci_hi",
                "level", "n", "method", "clamped"]
        vals = [d["nu_hat"], d["mu_hat"], d["nu_se"], d["mu_se"], *d["nu_ci"], *d["mu_ci"], d["level"], d["n"],
                d["method"], d["clamped"]]
        text = "# " + json.dumps(meta, sort_keys=True) + "\n" + ",".join(cols) + "\n"
        text += ",".join(fmt_float(v) if isinstance(v, float) else str(v) for v in vals) + "\n"
        _write(text, args.out)
    else:
        raise UsageError("estimate writes json or csv")
    return EXIT_OK


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"--fn {args.fn} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))


def cmd_eval(args) -> int:
    x = parse_grid(args.grid)
    fn = args.fn
    params = {}
    if fn == "ml":
        _need(args, "nu")
        y = mittag_leffler(args.nu, x)
        params = {"nu": args.nu}
    elif fn == "ml2":
        _need(args, "alpha", "beta")
        y = mittag_leffler_two_param(args.alpha, args.beta, x)
        params = {"alpha": args.alpha, "beta": args.beta}
    elif fn == "stable-pdf":
        _need(args, "alpha")
        y = stable_pdf(StableLaw(args.alpha), x)
        params = {"alpha": args.alpha}
    elif fn == "limit-pdf":
        _need(args, "nu")
        y = limit_pdf(LimitLawNu(args.nu), x)
        params = {"nu": args.nu}
    elif fn in ("interarrival-pdf", "survival"):
        _need(args, "nu", "mu")
        p = FppParams(args.nu, args.mu)
        y = interarrival_pdf(p, x) if fn == "interarrival-pdf" else survival(p, x)
        params = {"nu": args.nu, "mu": args.mu}
    elif fn == "pmf":
        _need(args, "nu", "mu", "n")
        p = FppParams(args.nu, args.mu)
        y = np.array([count_pmf(p, args.n, float(t)) for t in x])
        params = {"nu": args.nu, "mu": args.mu, "n": args.n}
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown function {fn!r}")
    meta = _meta("eval", fn=fn, grid=args.grid, **params)
    _write(_table(meta, ("x", "f"), zip(x, np.atleast_1d(y)), args.format or "csv"), args.out)
    return EXIT_OK


def _spec_from_args(args) -> ExperimentSpec:
    if args.spec is not None:
        path = Path(args.spec)
        if path.exists():
            try:
                spec = ExperimentSpec.load(path)
            except (json.JSONDecodeError, TypeError) as exc:
                raise DataError(f"cannot parse experiment spec {path}: {exc}") from None
        elif Path(args.spec).stem in BUNDLED_SPECS:
            spec = bundled_spec(Path(args.spec).stem)
        else:
            raise DataError(f"spec file {args.spec} not found")
        d = spec.to_dict()
    else:
        if args.nu is None or args.mu is None or args.sample_sizes is None:
            raise UsageError("give --spec, or at least --nu, --mu and --sample-sizes")
        d = {"nu": args.nu, "mu": args.mu}
    overrides = {
        "sample_sizes": args.sample_sizes, "replicates": args.replicates, "mode": args.mode,
        "ci_level": args.ci_level, "bootstrap_B": args.bootstrap_B,
    }
    for key in ("nu", "mu"):
        if args.spec is not None and getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    d.update({k: v for k, v in overrides.items() if v is not None})
    if args.seed is not None or "seed" not in d:
        d["seed"] = resolve_seed(args.seed)
    return ExperimentSpec.from_dict(d)


def cmd_experiment(args) -> int:
    spec = _spec_from_args(args)
    report = run_experiment(spec, workers=args.workers)
    _write(report_emit(report, args.format or "json"), args.out)
    return EXIT_OK


def _sizes(text):
    try:
        return [int(float(s)) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sample size list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default: $FPP_SEED or 0)")
    common.add_argument("--format", choices=("csv", "json", "jsonl", "markdown"), default=None)
    common.add_argument("--out", default=None, help="output path (default: stdout)")

    ap = argparse.ArgumentParser(prog="fracpoisson", description="Fractional Poisson process tools.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="simulate event times")
    s.add_argument("--nu", type=float, required=True)
    s.add_argument("--mu", type=float, required=True)
    s.add_argument("--n", type=int, default=None, help="number of events")
    s.add_argument("--horizon", type=float, default=None, help="time horizon")
    s.add_argument("--emit", choices=("arrival", "interarrival"), default="arrival")
    s.add_argument("--alt-fpp", action="store_true", help="sample the shot-noise variant on a time grid")
    s.add_argument("--grid", default=None, help="time grid start:stop:steps for --alt-fpp")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", parents=[common], help="estimate (nu, mu) from a data file")
    e.add_argument("--input", required=True)
    e.add_argument("--ci", choices=("asymptotic", "bootstrap", "both"), default="asymptotic")
    e.add_argument("--level", type=float, default=0.95)
    e.add_argument("--bootstrap-B", type=int, default=100)
    e.set_defaults(func=cmd_estimate)

    v = sub.add_parser("eval", parents=[common], help="tabulate a special function on a grid")
    v.add_argument("--fn", choices=EVAL_FUNCTIONS, required=True)
    v.add_argument("--grid", required=True, help="start:stop:steps, endpoints included")
    v.add_argument("--nu", type=float)
    v.add_argument("--mu", type=float)
    v.add_argument("--alpha", type=float)
    v.add_argument("--beta", type=float)
    v.add_argument("--n", type=int)
    v.set_defaults(func=cmd_eval)

    x = sub.add_parser("experiment", parents=[common], help="run a Monte Carlo study")
    x.add_argument("--spec", default=None, help="spec JSON file or bundled name (table2 ... table9)")
    x.add_argument("--nu", type=float)
    x.add_argument("--mu", type=float)
    x.add_argument("--sample-sizes", type=_sizes)
    x.add_argument("--replicates", type=int)
    x.add_argument("--mode", choices=("accuracy", "ci"))
    x.add_argument("--ci-level", type=float)
    x.add_argument("--bootstrap-B", type=int)
    x.add_argument("--workers", type=int, default=1)
    x.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"fracpoisson: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AccuracyError as exc:
        print(f"fracpoisson: accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except (DataError, EstimationError, OSError) as exc:
        print(f"fracpoisson: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"fracpoisson: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
