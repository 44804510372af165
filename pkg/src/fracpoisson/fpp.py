"""Fractional Poisson process: distributions, exact simulation and scaling limit.

Waiting times have survival ``E_nu(-mu t**nu)``. They are sampled exactly as
``|ln U1|**(1/nu) * mu**(-1/nu) * S`` with ``S`` one-sided ``nu``-stable.
Count probabilities come from the differentiated Mittag-Leffler series
when it is numerically safe, and otherwise from the Poisson mixture
``int M_nu(w) Poisson(n; mu t**nu w) dw`` over the M-Wright density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import AccuracyError, DataError
from .specfun import (
    DEFAULT_CONTROL,
    EvalControl,
    mittag_leffler,
    mittag_leffler_two_param,
)
from .stable import (
    UniformSource,
    kanter_transform,
    wright_m,
    wright_m_mixture,
    wright_m_mixture_panels,
)

__all__ = [
    "FppParams",
    "EventSeries",
    "LimitLawNu",
    "sample_interarrival",
    "simulate_path",
    "sample_counts",
    "interarrival_pdf",
    "interarrival_pdf_integral",
    "survival",
    "count_pmf",
    "count_pgf",
    "count_mean_var",
    "limit_pdf",
    "limit_moment",
    "relative_fluctuation",
    "poisson_skew_normal_cdf",
    "simulate_alternative_fpp",
    "PMF_MAX_MEAN",
]

# pmf/pgf are only offered for mu t**nu up to this value
PMF_MAX_MEAN = 50.0


@dataclass(frozen=True)
class FppParams:
    """Fractional order ``nu`` in (0, 1] and intensity ``mu > 0`` (units time**-nu)."""

    nu: float
    mu: float

    def __post_init__(self):
        if not (0.0 < self.nu <= 1.0):
            raise ValueError(f"nu must lie in (0, 1], got {self.nu}")
        if not (self.mu > 0.0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be positive and finite, got {self.mu}")


@dataclass(frozen=True)
class LimitLawNu:
    """Law of the scaling limit ``Z = lim N(t) / E N(t)``."""

    nu: float

    def __post_init__(self):
        if not (0.0 < self.nu <= 1.0):
            raise ValueError(f"nu must lie in (0, 1], got {self.nu}")


class EventSeries:
    """One realization of event times.

    The gaps are stored as given, since with heavy-tailed waiting times
    many gaps fall below the resolution of the running arrival time.
    ``origin`` records whether the data came as ``"arrival"`` times or as
    ``"interarrival"`` gaps.
    """

    def __init__(self, interarrivals, origin: str = "interarrival"):
        gaps = np.asarray(interarrivals, dtype=float).ravel()
        bad = np.flatnonzero(~(np.isfinite(gaps) & (gaps > 0)))
        if bad.size:
            i = int(bad[0])
            raise DataError(f"interarrival {i} is not a positive finite number: {gaps[i]!r}", index=i)
        if origin not in ("arrival", "interarrival"):
            raise ValueError(f"origin must be 'arrival' or 'interarrival', got {origin!r}")
        self.interarrivals = gaps
        self.origin = origin

    @classmethod
    def from_arrivals(cls, arrivals):
        a = np.asarray(arrivals, dtype=float).ravel()
        bad = np.flatnonzero(~(np.isfinite(a) & (a > 0)))
        if bad.size:
            i = int(bad[0])
            raise DataError(f"arrival {i} is not a positive finite number: {a[i]!r}", index=i)
        gaps = np.diff(a, prepend=0.0)
        bad = np.flatnonzero(gaps <= 0)
        if bad.size:
            i = int(bad[0])
            raise DataError(f"arrival times are not strictly increasing at index {i}", index=i)
        out = cls(gaps, origin="arrival")
        out._arrivals = a
        return out

    @property
    def arrivals(self):
        a = getattr(self, "_arrivals", None)
        return np.cumsum(self.interarrivals) if a is None else a

    def __len__(self):
        return self.interarrivals.size

    def __repr__(self):
        return f"EventSeries(n={len(self)}, origin={self.origin!r})"

    def step_function(self):
        """Trajectory as ``(arrival time, count)`` pairs."""
        return self.arrivals, np.arange(1, len(self) + 1)


def _interarrivals_from_uniforms(p: FppParams, u):
    """Waiting times from rows ``(U1, U2, U3)``."""
    e = -np.log(u[:, 0])
    if p.nu == 1.0:
        return e / p.mu
    s = kanter_transform(p.nu, u[:, 1], u[:, 2])
    return np.exp((np.log(e) - math.log(p.mu)) / p.nu) * s


def sample_interarrival(p: FppParams, rng: UniformSource, size=None):
    """Exact waiting-time draws; each draw uses one row of three uniforms."""
    n = 1 if size is None else int(np.prod(size))
    t = _interarrivals_from_uniforms(p, rng.uniform((n, 3)))
    return float(t[0]) if size is None else t.reshape(size)


def _expected_count(p: FppParams, t: float) -> float:
    return p.mu * t**p.nu / math.gamma(1.0 + p.nu)


def simulate_path(p: FppParams, rng: UniformSource, n: int | None = None, horizon: float | None = None):
    """Simulate one path by summing waiting times.

    Give exactly one of ``n`` (that many events) or ``horizon`` (all events
    up to that time; the first event beyond it is drawn and discarded).
    """
    if (n is None) == (horizon is None):
        raise ValueError("give exactly one of n or horizon")
    if n is not None:
        if int(n) != n or n < 1:
            raise ValueError("n must be a positive integer")
        return EventSeries(sample_interarrival(p, rng, int(n)))
    if not (horizon > 0):
        raise ValueError("horizon must be positive")
    block = max(16, int(1.2 * _expected_count(p, horizon)) + 16)
    gaps = []
    total = 0.0
    while True:
        g = sample_interarrival(p, rng, block)
        cum = total + np.cumsum(g)
        past = np.flatnonzero(cum > horizon)
        if past.size:
            gaps.append(g[: past[0]])
            break
        gaps.append(g)
        total = cum[-1]
    return EventSeries(np.concatenate(gaps))


def sample_counts(p: FppParams, t: float, n_paths: int, rng: UniformSource, batch: int = 1024):
    """Counts ``N(t)`` for ``n_paths`` independent paths, simulated in batches."""
    if not (t > 0):
        raise ValueError("t must be positive")
    en = _expected_count(p, t)
    first = max(8, int(math.ceil(en)) + 8)
    extra = max(8, int(math.ceil(0.5 * en)))
    out = np.empty(int(n_paths), dtype=np.int64)
    for lo in range(0, int(n_paths), batch):
        m = min(batch, int(n_paths) - lo)
        total = np.zeros(m)
        count = np.zeros(m, dtype=np.int64)
        active = np.arange(m)
        size = first
        while active.size:
            g = _interarrivals_from_uniforms(p, rng.uniform((active.size * size, 3))).reshape(active.size, size)
            cum = total[active, None] + np.cumsum(g, axis=1)
            inside = cum <= t
            count[active] += inside.sum(axis=1)
            done = ~inside[:, -1]
            total[active] = cum[:, -1]
            active = active[~done]
            size = extra
        out[lo:lo + m] = count
    return out


def _map_t(fn, t):
    t_arr = np.asarray(t, float)
    vals = np.array([fn(float(v)) for v in t_arr.ravel()]).reshape(t_arr.shape)
    return float(vals) if t_arr.ndim == 0 else vals


def interarrival_pdf(p: FppParams, t, ctl: EvalControl = DEFAULT_CONTROL):
    """Waiting-time density ``mu t**(nu-1) E_{nu,nu}(-mu t**nu)``."""

    def one(tv):
        if tv <= 0:
            raise ValueError("interarrival_pdf needs t > 0")
        if p.nu == 1.0:
            return p.mu * math.exp(-p.mu * tv)
        x = p.mu * tv**p.nu
        return p.mu * tv ** (p.nu - 1.0) * mittag_leffler_two_param(p.nu, p.nu, -x, ctl)

    return _map_t(one, t)


def _phi(nu, xi):
    return math.sin(nu * math.pi) / (math.pi * (xi**nu + xi**-nu + 2.0 * math.cos(nu * math.pi)))


def interarrival_pdf_integral(p: FppParams, t, rel_tol: float = 1e-11):
    """Waiting-time density from ``(1/t) int_0^inf exp(-x) phi_nu(mu**(1/nu) t / x) dx``.

    ``phi_nu(xi) = sin(nu pi) / (pi (xi**nu + xi**-nu + 2 cos(nu pi)))``.
    Evaluated with adaptive Gauss-Kronrod quadrature.
    """
    if not (0.0 < p.nu < 1.0):
        raise ValueError("the integral form needs 0 < nu < 1")

    def one(tv):
        if tv <= 0:
            raise ValueError("interarrival_pdf_integral needs t > 0")
        c = p.mu ** (1.0 / p.nu) * tv
        f = lambda x: math.exp(-x) * _phi(p.nu, c / x) if x > 0 else 0.0
        # phi peaks where its argument is 1, i.e. at x = c
        pieces = [(0.0, min(c, 40.0))]
        if c < 40.0:
            pieces.append((c, 40.0))
        total, err = 0.0, 0.0
        for a, b in pieces:
            v, e = integrate.quad(f, a, b, epsabs=0.0, epsrel=rel_tol, limit=200)
            total += v
            err += e
        v, e = integrate.quad(f, 40.0, np.inf, epsabs=0.0, epsrel=rel_tol, limit=200)
        total += v
        err += e
        if err > 100 * rel_tol * abs(total):
            raise AccuracyError("integral form did not converge", value=total / tv, bound=err / tv)
        return total / tv

    return _map_t(one, t)


def survival(p: FppParams, t, ctl: EvalControl = DEFAULT_CONTROL):
    """``P(T > t) = E_nu(-mu t**nu)``."""

    def one(tv):
        if tv < 0:
            raise ValueError("survival needs t >= 0")
        if tv == 0:
            return 1.0
        return mittag_leffler(p.nu, -p.mu * tv**p.nu, ctl)

    return _map_t(one, t)


def _pmf_series(nu, ns, x, ctl):
    """Alternating pmf series for all ``ns`` at once; returns (value, ok mask)."""
    lx = math.log(x)
    nn = ns.astype(float)[:, None]
    head = nn * lx - special.gammaln(nn + 1.0)
    parts = []
    lmax = np.full(ns.size, -np.inf)
    start = 0
    while True:
        k = np.arange(start, start + 64, dtype=float)[None, :]
        a = special.gammaln(k + nn + 1.0)
        b = special.gammaln(k + 1.0)
        c = special.gammaln(nu * (k + nn) + 1.0)
        lm = head + a - b - c + k * lx
        parts.append((lm, np.abs(head) + a + b + c + k * abs(lx), k))
        lmax = np.maximum(lmax, lm.max(axis=1))
        start += 64
        tail = lm[:, -8:]
        if np.all(tail < lmax[:, None] - 46.0) and np.all(np.diff(tail, axis=1) <= 0):
            converged = True
            break
        if start >= ctl.max_terms:
            converged = False
            break
    lm = np.concatenate([q[0] for q in parts], axis=1)
    scale = np.concatenate([q[1] for q in parts], axis=1)
    k = np.concatenate([q[2] for q in parts], axis=1)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        mag = np.exp(lm)
        value = (sign * mag).sum(axis=1)
        bound = np.finfo(float).eps * (mag * (4.0 + scale)).sum(axis=1)
        ok = converged & (lmax < 700.0) & (bound <= 0.1 * ctl.rel_tol * np.abs(value))
    return value, ok


def count_pmf(p: FppParams, n, t: float, ctl: EvalControl = DEFAULT_CONTROL):
    """``P(N(t) = n)`` for integer ``n >= 0`` (scalar or array).

    Offered for ``mu t**nu <= 50``; an :class:`AccuracyError` is raised beyond.
    """
    if not (t > 0):
        raise ValueError("count_pmf needs t > 0")
    n_arr = np.asarray(n)
    if np.any(n_arr < 0) or np.any(n_arr != np.floor(n_arr)):
        raise ValueError("n must be a nonnegative integer")
    ns = n_arr.astype(np.int64).ravel()
    x = p.mu * t**p.nu
    if p.nu == 1.0:
        out = np.exp(ns * math.log(x) - x - special.gammaln(ns + 1.0))
        return float(out[0]) if n_arr.ndim == 0 else out.reshape(n_arr.shape)
    if x > PMF_MAX_MEAN:
        raise AccuracyError(f"count_pmf is limited to mu t^nu <= {PMF_MAX_MEAN}, got {x}")

    out, ok = _pmf_series(p.nu, ns, x, ctl)
    todo = np.flatnonzero(~ok)
    if todo.size:
        out[todo] = _pmf_mixture(p.nu, ns[todo], x, ctl)
    # underflowed far-tail sums can come out as signed denormals
    out = np.maximum(out, 0.0)
    return float(out[0]) if n_arr.ndim == 0 else out.reshape(n_arr.shape)


def _pmf_mixture(nu, ns, x, ctl):
    """``int M_nu(w) Poisson(n; x w) dw`` for each ``n`` in ``ns``."""
    nt = ns.astype(float)
    lnf = special.gammaln(nt + 1.0)
    lx = math.log(x)

    def log_kernel(w, idx):
        with np.errstate(divide="ignore"):
            return nt[idx][:, None] * (lx + np.log(w)) - x * w - lnf[idx][:, None]

    vals = np.zeros(ns.size)
    todo = np.arange(ns.size)
    if ns.size > 8:
        # support of the integrand: Poisson peaks sit at n/x, and M_nu
        # has a faster-than-exponential right tail
        grid = np.logspace(-10, 4, 561)
        with np.errstate(divide="ignore"):
            lf = np.log(wright_m(nu, grid, ctl))[None, :] + log_kernel(
                np.broadcast_to(grid, (ns.size, grid.size)), np.arange(ns.size))
        peak = lf.max(axis=1)
        inside = lf >= peak[:, None] - 60.0
        w_hi = grid[np.flatnonzero(inside.any(axis=0)).max()]
        w_lo = min(1e-3 / x, 1e-3)
        v, e = wright_m_mixture_panels(nu, log_kernel, ns.size, w_lo, max(w_hi, 10 * w_lo), ctl)
        good = e <= ctl.rel_tol * np.abs(v)
        vals[good] = v[good]
        todo = np.flatnonzero(~good)
    if todo.size:
        sub = todo
        v, e = wright_m_mixture(nu, lambda w, idx: log_kernel(w, sub[idx]), sub.size, ctl)
        if np.any(e > ctl.rel_tol * np.abs(v)):
            raise AccuracyError("count_pmf mixture integral did not converge", value=v, bound=e)
        vals[sub] = v
    return vals


def count_pgf(p: FppParams, u, t: float, ctl: EvalControl = DEFAULT_CONTROL):
    """Probability generating function ``E u**N(t) = E_nu(mu t**nu (u - 1))`` for ``u`` in [0, 1]."""
    u_arr = np.asarray(u, float)
    if np.any((u_arr < 0) | (u_arr > 1)):
        raise ValueError("u must lie in [0, 1]")
    x = p.mu * t**p.nu
    if p.nu < 1.0 and x > PMF_MAX_MEAN:
        raise AccuracyError(f"count_pgf is limited to mu t^nu <= {PMF_MAX_MEAN}, got {x}")
    return mittag_leffler(p.nu, x * (u_arr - 1.0), ctl)


def count_mean_var(p: FppParams, t: float):
    """Mean and variance of ``N(t)``.

    ``mean = mu t**nu / Gamma(1 + nu)`` and
    ``var = mean (1 + mean (nu B(nu, 1/2) / 2**(2 nu - 1) - 1))``.
    """
    mean = p.mu * t**p.nu / math.gamma(1.0 + p.nu)
    bracket = p.nu * special.beta(p.nu, 0.5) / 2.0 ** (2.0 * p.nu - 1.0) - 1.0
    return mean, mean * (1.0 + mean * bracket)


def limit_pdf(law: LimitLawNu, z, ctl: EvalControl = DEFAULT_CONTROL):
    """Density ``f_nu(z) = M_nu(z / Gamma(1+nu)) / Gamma(1+nu)`` of the scaling limit.

    Series in ``z`` where it is accurate, the stable density otherwise.
    ``f_nu(0) = sin(nu pi) / (nu pi)``.
    """
    if law.nu == 1.0:
        raise ValueError("the nu = 1 limit is a point mass at 1")
    z_arr = np.asarray(z, float)
    if np.any(z_arr < 0):
        raise ValueError("limit_pdf needs z >= 0")
    g = math.gamma(1.0 + law.nu)
    out = wright_m(law.nu, z_arr / g, ctl) / g
    return float(out) if z_arr.ndim == 0 else out


def limit_moment(law: LimitLawNu, k: int) -> float:
    """``E Z**k = Gamma(1+nu)**k Gamma(1+k) / Gamma(1+k nu)``."""
    if int(k) != k or k < 0:
        raise ValueError("k must be a nonnegative integer")
    nu = law.nu
    return math.exp(k * math.lgamma(1.0 + nu) + math.lgamma(1.0 + k) - math.lgamma(1.0 + k * nu))


def relative_fluctuation(law: LimitLawNu) -> float:
    """Limiting relative fluctuation ``sqrt(2 nu B(nu, 1 + nu) - 1)`` of the count."""
    nu = law.nu
    return math.sqrt(max(0.0, 2.0 * nu * special.beta(nu, 1.0 + nu) - 1.0))


def poisson_skew_normal_cdf(mean: float, n):
    """Skew-normal approximation ``Phi(z) - (z**2 - 1) phi(z) / (6 sqrt(mean))`` to the Poisson CDF.

    Uses the continuity-corrected ``z = (n + 1/2 - mean) / sqrt(mean)``.
    """
    if not (mean > 0):
        raise ValueError("mean must be positive")
    z = (np.asarray(n, float) + 0.5 - mean) / math.sqrt(mean)
    dens = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    out = special.ndtr(z) - (z * z - 1.0) * dens / (6.0 * math.sqrt(mean))
    return float(out) if np.ndim(out) == 0 else out


def simulate_alternative_fpp(p: FppParams, horizon: float, grid, rng: UniformSource):
    """Shot-noise process ``Y(t) = sum_{T_j < t} (t - T_j)**(nu-1) / Gamma(nu)``.

    ``T_j`` are the arrivals of an ordinary Poisson process with rate ``mu``
    on ``[0, horizon]``. For ``nu = 1`` every pulse is a unit step and
    ``Y`` is the Poisson count (arrivals at ``t`` itself included).
    Returns ``(grid, Y(grid), arrivals)``.
    """
    grid = np.asarray(grid, float)
    if np.any(grid < 0) or np.any(grid > horizon):
        raise ValueError("grid points must lie in [0, horizon]")
    block = max(16, int(1.2 * p.mu * horizon) + 16)
    arr = []
    total = 0.0
    while True:
        cum = total + np.cumsum(-np.log(rng.uniform(block)) / p.mu)
        past = np.flatnonzero(cum > horizon)
        if past.size:
            arr.append(cum[: past[0]])
            break
        arr.append(cum)
        total = cum[-1]
    times = np.concatenate(arr)
    lag = grid[:, None] - times[None, :]
    if p.nu == 1.0:
        y = (lag >= 0).sum(axis=1).astype(float)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            pulses = np.where(lag > 0, lag ** (p.nu - 1.0), 0.0)
        y = pulses.sum(axis=1) / math.gamma(p.nu)
    return grid, y, times
