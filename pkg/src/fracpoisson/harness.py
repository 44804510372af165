"""Monte Carlo studies of the moment estimators.

An experiment draws ``replicates`` independent samples of ``N`` waiting
times for each sample size, estimates (nu, mu) on each and aggregates the
results. Two modes are offered. ``accuracy`` reports the mean, the mean
absolute deviation from the truth and the root mean squared error.
``ci`` reports averaged interval endpoints and coverage.

Replicate ``r`` at sample size ``N`` always uses stream ``(seed, r, N)``,
so reports are bit-identical however the replicates are scheduled.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from . import __version__
from .errors import FppError
from .estimate import (
    asymptotic_se,
    bootstrap_ci,
    confidence_intervals,
    estimate_mu,
    estimate_nu,
    log_moment_summary,
)
from .fpp import FppParams, sample_interarrival
from .stable import UniformSource

__all__ = [
    "ExperimentSpec",
    "CellStats",
    "McReport",
    "run_replicate",
    "run_accuracy",
    "run_ci",
    "run_experiment",
    "report_emit",
    "report_from_json",
    "bundled_spec",
    "BUNDLED_SPECS",
]

BUNDLED_SPECS = tuple(f"table{i}" for i in range(2, 10))


@dataclass(frozen=True)
class ExperimentSpec:
    """Parameters of one simulation study."""

    nu: float
    mu: float
    sample_sizes: tuple
    replicates: int = 100
    seed: int = 0
    ci_level: float = 0.95
    bootstrap_B: int = 100
    mode: str = "accuracy"

    def __post_init__(self):
        FppParams(self.nu, self.mu)
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        if not self.sample_sizes or any(n < 10 for n in self.sample_sizes):
            raise ValueError("sample_sizes must be nonempty with every entry >= 10")
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise ValueError("replicates must be a positive integer")
        if not (0.0 < self.ci_level < 1.0):
            raise ValueError("ci_level must lie in (0, 1)")
        if int(self.bootstrap_B) != self.bootstrap_B or self.bootstrap_B < 0 or self.bootstrap_B == 1:
            raise ValueError("bootstrap_B must be 0 (disabled) or an integer >= 2")
        if self.mode not in ("accuracy", "ci"):
            raise ValueError(f"mode must be 'accuracy' or 'ci', got {self.mode!r}")
        if int(self.seed) != self.seed or not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def params(self) -> FppParams:
        return FppParams(self.nu, self.mu)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sample_sizes"] = list(self.sample_sizes)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        known = {"nu", "mu", "sample_sizes", "replicates", "seed", "ci_level", "bootstrap_B", "mode"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown experiment spec fields: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "ExperimentSpec":
        return cls.from_json(Path(path).read_text())


def bundled_spec(name: str) -> ExperimentSpec:
    """One of the shipped specs ``table2`` ... ``table9``."""
    name = name[:-5] if name.endswith(".json") else name
    if name not in BUNDLED_SPECS:
        raise ValueError(f"no bundled spec {name!r}; choose from {', '.join(BUNDLED_SPECS)}")
    text = resources.files("fracpoisson").joinpath("specs", name + ".json").read_text()
    return ExperimentSpec.from_json(text)


@dataclass
class CellStats:
    """Summary of one (parameter, N) cell."""

    param: str
    N: int
    true: float
    mean: float
    mad: float
    sqrt_mse: float
    n_ok: int
    failures: int
    clamp_count: int = 0
    avg_ci: list | None = None
    bootstrap_ci: list | None = None
    coverage: float | None = None


@dataclass
class McReport:
    """Results of an experiment, one :class:`CellStats` per (parameter, N)."""

    spec: dict
    cells: list = field(default_factory=list)
    version: str = __version__

    def cell(self, param: str, N: int) -> CellStats:
        for c in self.cells:
            if c.param == param and c.N == N:
                return c
        raise KeyError((param, N))

    def to_dict(self) -> dict:
        return {"version": self.version, "spec": self.spec, "cells": [asdict(c) for c in self.cells]}

    @classmethod
    def from_dict(cls, d: dict) -> "McReport":
        return cls(spec=d["spec"], cells=[CellStats(**c) for c in d["cells"]], version=d["version"])


def run_replicate(spec: ExperimentSpec, N: int, r: int, bootstrap: bool) -> dict:
    """Simulate and estimate one data set; errors are returned, not raised."""
    p = spec.params
    src = UniformSource(spec.seed, stream_id=r, path=(N,))
    x = sample_interarrival(p, src.substream(0), N)
    try:
        s = log_moment_summary(x)
        nu = estimate_nu(s)
        out = {"nu": nu.raw, "mu": estimate_mu(s, nu.raw), "clamped": nu.clamped}
        if spec.mode == "ci":
            mu_c = estimate_mu(s, nu.value)
            nu_se, mu_se = asymptotic_se(nu.value, mu_c, N)
            iv = confidence_intervals(nu.value, mu_c, nu_se, mu_se, spec.ci_level)
            out["nu_ci"], out["mu_ci"] = iv.nu_ci, iv.mu_ci
            if bootstrap:
                bs = bootstrap_ci(x, spec.ci_level, spec.bootstrap_B, rng=src.substream(1))
                out["nu_boot"], out["mu_boot"] = bs.nu_ci, bs.mu_ci
    except FppError as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}
    return out


def _fsum_mean(vals):
    return math.fsum(vals) / len(vals) if vals else math.nan


def _aggregate(spec: ExperimentSpec, N: int, results: list, bootstrap: bool) -> list:
    ok = [res for res in results if "error" not in res]
    failures = len(results) - len(ok)
    cells = []
    for param, true in (("nu", spec.nu), ("mu", spec.mu)):
        est = [res[param] for res in ok]
        mad = _fsum_mean([abs(e - true) for e in est])
        mse = _fsum_mean([(e - true) ** 2 for e in est])
        cell = CellStats(param, N, true, _fsum_mean(est), mad, math.sqrt(mse), len(ok), failures,
                         clamp_count=sum(res["clamped"] for res in ok))
        if ok and not (cell.mad <= cell.sqrt_mse * (1.0 + 1e-12)):
            raise AssertionError(f"MAD exceeds root MSE in cell {param}, N={N}")
        if spec.mode == "ci" and ok:
            lo = [res[param + "_ci"][0] for res in ok]
            hi = [res[param + "_ci"][1] for res in ok]
            cell.avg_ci = [_fsum_mean(lo), _fsum_mean(hi)]
            cell.coverage = sum(a <= true <= b for a, b in zip(lo, hi)) / len(ok)
            if bootstrap:
                blo = [res[param + "_boot"][0] for res in ok]
                bhi = [res[param + "_boot"][1] for res in ok]
                cell.bootstrap_ci = [_fsum_mean(blo), _fsum_mean(bhi)]
        cells.append(cell)
    return cells


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> McReport:
    """Run every (N, replicate) task and aggregate in replicate order."""
    bootstrap = spec.mode == "ci" and spec.bootstrap_B >= 2
    report = McReport(spec=spec.to_dict())
    for N in spec.sample_sizes:
        reps = range(spec.replicates)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda r: run_replicate(spec, N, r, bootstrap), reps))
        else:
            results = [run_replicate(spec, N, r, bootstrap) for r in reps]
        report.cells.extend(_aggregate(spec, N, results, bootstrap))
    return report


def run_accuracy(spec: ExperimentSpec, workers: int = 1) -> McReport:
    """Mean, MAD and root MSE of the estimates for each sample size."""
    if spec.mode != "accuracy":
        raise ValueError("run_accuracy needs mode='accuracy'")
    return run_experiment(spec, workers)


def run_ci(spec: ExperimentSpec, workers: int = 1) -> McReport:
    """Averaged interval endpoints and coverage for each sample size."""
    if spec.mode != "ci":
        raise ValueError("run_ci needs mode='ci'")
    return run_experiment(spec, workers)


_CSV_FIELDS = ["param", "N", "true", "mean", "mad", "sqrt_mse", "n_ok", "failures", "clamp_count",
               "avg_ci_lo", "avg_ci_hi", "bootstrap_ci_lo", "bootstrap_ci_hi", "coverage"]


def _num(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _fmt4(x):
    """Compact table number similar to 4 significant digits."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "-"
    ax = abs(x)
    if ax >= 1000:
        return f"{x:.0f}"
    s = f"{x:.4g}"
    return s[1:] if s.startswith("0.") else s


def report_emit(r: McReport, fmt: str = "json") -> str:
    """Serialize a report as ``json``, ``csv`` or ``markdown``.

    Every format starts with a metadata record (package version and the
    experiment spec).
    """
    meta = {"version": r.version, "spec": r.spec}
    if fmt == "json":
        return json.dumps(r.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_CSV_FIELDS)
        for c in r.cells:
            avg = c.avg_ci or [None, None]
            boot = c.bootstrap_ci or [None, None]
            w.writerow([_num(v) for v in (c.param, c.N, c.true, c.mean, c.mad, c.sqrt_mse, c.n_ok,
                                          c.failures, c.clamp_count, avg[0], avg[1], boot[0], boot[1],
                                          c.coverage)])
        return buf.getvalue()
    if fmt == "markdown":
        return _markdown(r, meta)
    raise ValueError(f"unsupported report format {fmt!r}")


def _markdown(r: McReport, meta: dict) -> str:
    lines = [f"<!-- {json.dumps(meta, sort_keys=True)} -->"]
    spec = r.spec
    sizes = sorted({c.N for c in r.cells})
    ci_mode = spec.get("mode") == "ci"
    head = f"(nu, mu) = ({spec.get('nu')}, {spec.get('mu')}), {spec.get('replicates')} replicates"
    lines.append("")
    lines.append(head)
    lines.append("")
    label = {"nu": "nu_hat", "mu": "mu_hat"} if not ci_mode else {"nu": "nu", "mu": "mu"}
    if not ci_mode:
        top = ["|    |"] + [f" N={N:,} | | |" for N in sizes]
        sub = ["|    |"] + [" Mean | MAD | sqrt(MSE) |" for _ in sizes]
        rule = ["|----|"] + ["---|---|---|" for _ in sizes]
        lines += ["".join(top), "".join(sub), "".join(rule)]
        for param in ("nu", "mu"):
            row = [f"| {label[param]} |"]
            for N in sizes:
                try:
                    c = r.cell(param, N)
                    row.append(f" {_fmt4(c.mean)} | {_fmt4(c.mad)} | {_fmt4(c.sqrt_mse)} |")
                except KeyError:
                    row.append(" - | - | - |")
            lines.append("".join(row))
    else:
        top = ["|    |"] + [f" N={N:,} | |" for N in sizes]
        sub = ["|    |"] + [" Average | Bootstrap |" for _ in sizes]
        rule = ["|----|"] + ["---|---|" for _ in sizes]
        lines += ["".join(top), "".join(sub), "".join(rule)]

        def pair(v):
            return "-" if not v else f"({_fmt4(v[0])}, {_fmt4(v[1])})"

        for param in ("nu", "mu"):
            row = [f"| {label[param]} |"]
            for N in sizes:
                try:
                    c = r.cell(param, N)
                    row.append(f" {pair(c.avg_ci)} | {pair(c.bootstrap_ci)} |")
                except KeyError:
                    row.append(" - | - |")
            lines.append("".join(row))
        lines.append("")
        cov = ", ".join(f"{c.param} N={c.N}: {c.coverage:.3f}" for c in r.cells if c.coverage is not None)
        lines.append(f"coverage of the asymptotic interval: {cov}" if cov else "coverage: -")
    clamps = sum(c.clamp_count for c in r.cells if c.param == "nu")
    fails = sum(c.failures for c in r.cells if c.param == "nu")
    lines.append("")
    lines.append(f"clamped nu estimates: {clamps}; failed replicates: {fails}")
    return "\n".join(lines) + "\n"


def report_from_json(text: str) -> McReport:
    return McReport.from_dict(json.loads(text))
