"""Method-of-moments estimation of (nu, mu) from waiting times.

Both estimators are functions of the sample mean and (divide-by-n)
variance of ``ln T``:

    nu_hat = pi / sqrt(3 (var_log + pi**2 / 6))
    mu_hat = exp(-nu_hat (mean_log + C))

Standard errors come from the joint normal limit of the two log-moments
pushed through the delta method; bootstrap intervals resample ``ln T``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import special

from .errors import DataError, EstimationError, SampleSizeError
from .fpp import EventSeries, FppParams
from .specfun import EULER_GAMMA, ZETA3
from .stable import UniformSource

__all__ = [
    "LogMomentSummary",
    "NuEstimate",
    "Intervals",
    "BootstrapResult",
    "Estimate",
    "log_moment_summary",
    "estimate_nu",
    "estimate_mu",
    "asymptotic_se",
    "normal_quantile",
    "confidence_intervals",
    "bootstrap_ci",
    "theoretical_log_moments",
    "LogMoments",
    "nu_variance_delta",
    "mu_variance_sandwich",
    "fit",
]

PI2 = math.pi**2


@dataclass(frozen=True)
class LogMomentSummary:
    """Sample size, mean of ``ln T`` and its divide-by-n variance."""

    n: int
    mean_log: float
    var_log: float


class NuEstimate(NamedTuple):
    value: float
    clamped: bool
    raw: float


class Intervals(NamedTuple):
    nu_ci: tuple
    mu_ci: tuple
    nu_truncated: bool
    mu_truncated: bool


def _as_interarrivals(data) -> np.ndarray:
    if isinstance(data, EventSeries):
        return data.interarrivals
    x = np.asarray(data, dtype=float).ravel()
    bad = np.flatnonzero(~(np.isfinite(x) & (x > 0)))
    if bad.size:
        i = int(bad[0])
        raise DataError(f"interarrival {i} is not a positive finite number: {x[i]!r}", index=i)
    return x


def _summary_from_logs(logs: np.ndarray) -> LogMomentSummary:
    n = logs.size
    mean = math.fsum(logs) / n
    dev = logs - mean
    return LogMomentSummary(n, mean, math.fsum(dev * dev) / n)


def log_moment_summary(data) -> LogMomentSummary:
    """Mean and divide-by-n variance of ``ln T``.

    ``data`` is an :class:`EventSeries` or a sequence of waiting times.
    """
    x = _as_interarrivals(data)
    if x.size < 2:
        raise SampleSizeError(f"need at least 2 waiting times, got {x.size}")
    return _summary_from_logs(np.log(x))


def _nu_raw(var_log):
    return math.pi / math.sqrt(3.0 * (var_log + PI2 / 6.0))


def estimate_nu(s: LogMomentSummary) -> NuEstimate:
    """``pi / sqrt(3 (var_log + pi^2/6))``, clamped to 1 (with a flag) when it exceeds 1."""
    raw = _nu_raw(s.var_log)
    if raw > 1.0:
        return NuEstimate(1.0, True, raw)
    return NuEstimate(raw, False, raw)


def estimate_mu(s: LogMomentSummary, nu_hat: float) -> float:
    """``exp(-nu_hat (mean_log + C))``.

    Any positive ``nu_hat`` is accepted so that unclamped values can be
    propagated in simulation studies.
    """
    if not (nu_hat > 0):
        raise ValueError("nu_hat must be positive")
    return math.exp(-nu_hat * (s.mean_log + EULER_GAMMA))


def asymptotic_se(nu_hat: float, mu_hat: float, n: int):
    """Large-sample standard errors ``(nu_se, mu_se)``."""
    if n < 1:
        raise ValueError("n must be positive")
    nu2 = nu_hat * nu_hat
    rad_nu = nu2 * (32.0 - 20.0 * nu2 - nu2 * nu2) / 40.0
    lm = math.log(mu_hat)
    rad_mu = mu_hat**2 * (
        20.0 * PI2**2 * (2.0 - nu2)
        - 3.0 * PI2 * (nu2 * nu2 + 20.0 * nu2 - 32.0) * lm * lm
        - 720.0 * nu_hat**3 * lm * ZETA3
    ) / (120.0 * PI2)
    if rad_nu < 0 or rad_mu < 0:
        raise EstimationError(
            f"negative variance radicand (nu: {rad_nu:.3g}, mu: {rad_mu:.3g}) at nu_hat={nu_hat}, mu_hat={mu_hat}"
        )
    return math.sqrt(rad_nu / n), math.sqrt(rad_mu / n)


def normal_quantile(level: float) -> float:
    """Two-sided standard normal critical value for coverage ``level``."""
    if not (0.0 < level < 1.0):
        raise ValueError(f"level must lie in (0, 1), got {level}")
    return float(special.ndtri(0.5 + 0.5 * level))


def confidence_intervals(nu_hat, mu_hat, nu_se, mu_se, level: float = 0.95) -> Intervals:
    """Normal-theory intervals ``point +- z se``.

    The nu interval is cut to (0, 1] and the mu interval at 0; the flags
    record whether a cut happened.
    """
    z = normal_quantile(level)
    nlo, nhi = nu_hat - z * nu_se, nu_hat + z * nu_se
    mlo, mhi = mu_hat - z * mu_se, mu_hat + z * mu_se
    nu_cut = nlo < 0.0 or nhi > 1.0
    mu_cut = mlo < 0.0
    return Intervals((max(nlo, 0.0), min(nhi, 1.0)), (max(mlo, 0.0), mhi), nu_cut, mu_cut)


@dataclass
class BootstrapResult:
    nu_ci: tuple
    mu_ci: tuple
    B: int
    skipped: int
    nu_reps: np.ndarray = field(repr=False)
    mu_reps: np.ndarray = field(repr=False)


def bootstrap_ci(data, level: float = 0.95, B: int = 100, rng: UniformSource | None = None,
                 seed: int = 0) -> BootstrapResult:
    """Basic bootstrap intervals ``(2 th - q_hi, 2 th - q_lo)`` for nu and mu.

    Waiting times are resampled with replacement; replicate ``b`` draws
    from its own sub-stream so the result does not depend on execution
    order. Resamples with zero log-variance are skipped and counted
    (unless the data themselves are constant). The nu interval is built
    from unclamped estimates and then cut to [0, 1]; mu uses the clamped
    nu, as the point estimate does.
    """
    if int(B) != B or B < 2:
        raise ValueError("B must be an integer >= 2")
    if not (0.0 < level < 1.0):
        raise ValueError(f"level must lie in (0, 1), got {level}")
    x = _as_interarrivals(data)
    if x.size < 2:
        raise SampleSizeError(f"need at least 2 waiting times, got {x.size}")
    rng = UniformSource(seed) if rng is None else rng
    logs = np.log(x)
    s0 = _summary_from_logs(logs)
    nu0 = _nu_raw(s0.var_log)
    mu0 = estimate_mu(s0, min(nu0, 1.0))
    degenerate_data = s0.var_log == 0.0

    nus, mus = [], []
    skipped = 0
    for b in range(int(B)):
        idx = rng.substream(b).integers(x.size, size=x.size)
        s = _summary_from_logs(logs[idx])
        if s.var_log == 0.0 and not degenerate_data:
            skipped += 1
            continue
        nu_b = _nu_raw(s.var_log)
        nus.append(nu_b)
        mus.append(estimate_mu(s, min(nu_b, 1.0)))
    if len(nus) < 2:
        raise EstimationError(f"only {len(nus)} usable bootstrap resamples out of {B}")
    nus = np.sort(np.asarray(nus))
    mus = np.sort(np.asarray(mus))
    a = 0.5 * (1.0 - level)
    nq = np.quantile(nus, [a, 1.0 - a])
    mq = np.quantile(mus, [a, 1.0 - a])
    nu_ci = tuple(min(max(v, 0.0), 1.0) for v in (2.0 * nu0 - nq[1], 2.0 * nu0 - nq[0]))
    mu_ci = (max(2.0 * mu0 - mq[1], 0.0), 2.0 * mu0 - mq[0])
    return BootstrapResult(nu_ci, mu_ci, int(B), skipped, nus, mus)


class LogMoments(NamedTuple):
    """Raw moments ``E (ln T)^k`` for k = 1..4 and central moments of ``ln T``."""

    m1: float
    m2: float
    m3: float
    m4: float
    var: float
    mu3: float
    mu4: float


def theoretical_log_moments(p: FppParams) -> LogMoments:
    """Closed-form log-moments of the waiting time."""
    nu, C = p.nu, EULER_GAMMA
    L = math.log(p.mu)
    a = C * nu + L
    q = 2.0 * C**2 * nu**2 - PI2 * (nu**2 - 2.0)
    m1 = -(L / nu + C)
    m2 = C**2 - PI2 * (nu**2 - 2.0) / (6.0 * nu**2) + L * (2.0 * C * nu + L) / nu**2
    m3 = -a * (q + 2.0 * L * (2.0 * C * nu + L)) / (2.0 * nu**3) - 2.0 * ZETA3
    m4 = (
        60.0 * C**4 * nu**4
        - 60.0 * C**2 * PI2 * nu**2 * (nu**2 - 2.0)
        + PI2**2 * (28.0 - 20.0 * nu**2 + nu**4)
        + 60.0 * L * (2.0 * C * nu + L) * (q + 2.0 * C * nu * L + L * L)
        + 480.0 * nu**3 * a * ZETA3
    ) / (60.0 * nu**4)
    var = PI2 / 3.0 * (1.0 / nu**2 - 0.5)
    mu4 = PI2**2 * (28.0 - 20.0 * nu**2 + nu**4) / (60.0 * nu**4)
    return LogMoments(m1, m2, m3, m4, var, -2.0 * ZETA3, mu4)


def nu_variance_delta(p: FppParams) -> float:
    """Limit variance of ``sqrt(n) nu_hat`` as ``18 pi^2 (mu4 - var^2) / (6 var + pi^2)^3``."""
    lm = theoretical_log_moments(p)
    return 18.0 * PI2 * (lm.mu4 - lm.var**2) / (6.0 * lm.var + PI2) ** 3


def mu_variance_sandwich(p: FppParams) -> float:
    """Limit variance of ``sqrt(n) mu_hat`` as ``grad^T Sigma grad``.

    ``Sigma`` is the covariance of (mean, variance) of ``ln T``; the
    gradient is that of ``exp(-pi (m + C) / sqrt(3 (s2 + pi^2/6)))``.
    """
    lm = theoretical_log_moments(p)
    m, s2 = lm.m1, lm.var
    r = PI2 + 6.0 * s2
    g = math.exp(-math.sqrt(2.0) * math.pi * (m + EULER_GAMMA) / math.sqrt(r))
    grad = np.array([
        -math.sqrt(2.0) * math.pi / math.sqrt(r) * g,
        3.0 * math.sqrt(2.0) * math.pi * (m + EULER_GAMMA) / r**1.5 * g,
    ])
    sigma = np.array([[s2, lm.mu3], [lm.mu3, lm.mu4 - s2 * s2]])
    return float(grad @ sigma @ grad)


@dataclass
class Estimate:
    """Point estimates with standard errors and intervals."""

    nu_hat: float
    mu_hat: float
    nu_se: float
    mu_se: float
    nu_ci: tuple
    mu_ci: tuple
    level: float
    n: int
    method: str
    clamped: bool
    nu_raw: float = math.nan
    nu_ci_truncated: bool = False
    mu_ci_truncated: bool = False
    bootstrap: dict | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["nu_ci"] = list(self.nu_ci)
        d["mu_ci"] = list(self.mu_ci)
        if self.bootstrap is None:
            d.pop("bootstrap")
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def fit(data, level: float = 0.95, ci: str = "asymptotic", B: int = 100,
        rng: UniformSource | None = None, seed: int = 0) -> Estimate:
    """Estimate (nu, mu) with intervals.

    ``ci`` is ``"asymptotic"``, ``"bootstrap"`` or ``"both"``; with
    ``"both"`` the main intervals are asymptotic and the bootstrap ones are
    attached under ``bootstrap``.
    """
    if ci not in ("asymptotic", "bootstrap", "both"):
        raise ValueError(f"unknown interval method {ci!r}")
    s = log_moment_summary(data)
    nu = estimate_nu(s)
    mu_hat = estimate_mu(s, nu.value)
    nu_se, mu_se = asymptotic_se(nu.value, mu_hat, s.n)
    iv = confidence_intervals(nu.value, mu_hat, nu_se, mu_se, level)
    est = Estimate(nu.value, mu_hat, nu_se, mu_se, iv.nu_ci, iv.mu_ci, level, s.n, ci,
                   nu.clamped, nu.raw, iv.nu_truncated, iv.mu_truncated)
    if ci == "asymptotic":
        return est
    bs = bootstrap_ci(data, level, B, rng=rng, seed=seed)
    boot = {"nu_ci": list(bs.nu_ci), "mu_ci": list(bs.mu_ci), "B": bs.B, "skipped": bs.skipped}
    if ci == "bootstrap":
        est.nu_ci, est.mu_ci = bs.nu_ci, bs.mu_ci
        est.nu_ci_truncated = est.mu_ci_truncated = False
        est.bootstrap = boot
    else:
        est.method = "both"
        est.bootstrap = boot
    return est
