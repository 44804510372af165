"""One-sided (totally skewed) alpha-stable laws with Laplace transform exp(-lam^alpha).

Sampling uses Kanter's representation from two uniforms. Densities are
computed from Zolotarev's integral over (0, pi), split at the integrand's
peak and integrated with tanh-sinh; for t >= 1 the convergent series in
t^-alpha is summed instead whenever its rounding bound allows. The M-Wright function (the density of
``S**-alpha``) is built on top of the density and feeds the scaling-limit
law and the count distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import AccuracyError
from .quadrature import tanh_sinh
from .specfun import DEFAULT_CONTROL, EULER_GAMMA, ZETA3, EvalControl

__all__ = [
    "StableLaw",
    "UniformSource",
    "stable_laplace",
    "sample_stable",
    "kanter_transform",
    "stable_pdf",
    "stable_pdf_saddlepoint",
    "stable_moment",
    "stable_log_moment",
    "wright_m",
    "wright_m_mixture",
    "wright_m_mixture_panels",
    "wright_m_integral",
]

# above this the Zolotarev integrand is too stiff to integrate reliably
ALPHA_PDF_MAX = 0.995
# batch size for vectorized series and quadrature evaluations
_CHUNK = 2048


@dataclass(frozen=True)
class StableLaw:
    """Stability exponent ``alpha`` in (0, 1]; ``alpha = 1`` is the point mass at 1."""

    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")


class UniformSource:
    """Counter-based stream of uniforms on the open interval (0, 1).

    Streams are addressed by ``(seed, stream_id)`` plus an optional path of
    sub-stream indices, so that replicate ``r`` of an experiment can be
    regenerated without touching any other replicate.
    """

    def __init__(self, seed, stream_id: int = 0, path: tuple = ()):
        seeds = tuple(seed) if isinstance(seed, (tuple, list)) else (seed,)
        for s in seeds:
            if int(s) != s or not (0 <= s < 2**64):
                raise ValueError(f"seed components must be 64-bit unsigned integers, got {s}")
        if int(stream_id) != stream_id or not (0 <= stream_id < 2**64):
            raise ValueError(f"stream_id must be a 64-bit unsigned integer, got {stream_id}")
        self.seed = seed
        self.stream_id = int(stream_id)
        self.path = tuple(int(p) for p in path)
        ss = np.random.SeedSequence([int(s) for s in seeds], spawn_key=(self.stream_id, *self.path))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def __repr__(self):
        return f"UniformSource(seed={self.seed!r}, stream_id={self.stream_id}, path={self.path})"

    def substream(self, index: int) -> "UniformSource":
        return UniformSource(self.seed, self.stream_id, self.path + (int(index),))

    def uniform(self, size=None):
        u = self._gen.random(size)
        if size is None:
            while u == 0.0:
                u = self._gen.random()
            return u
        # exact zeros have probability 2**-53; redraw them in place
        bad = u == 0.0
        while bad.any():
            u[bad] = self._gen.random(int(bad.sum()))
            bad = u == 0.0
        return u

    def integers(self, high: int, size=None):
        """Integers uniform on ``{0, ..., high-1}``."""
        return self._gen.integers(0, high, size=size)


def stable_laplace(law: StableLaw, lam):
    """Laplace transform ``exp(-lam**alpha)``."""
    return np.exp(-np.power(lam, law.alpha))


def kanter_transform(alpha: float, u2, u3):
    """Map two open-interval uniforms to a standard one-sided ``alpha``-stable draw.

    ``sin(a pi u2) sin((1-a) pi u2)^(1/a-1) / (sin(pi u2)^(1/a) |ln u3|^(1/a-1))``,
    evaluated in logs. For ``alpha = 1`` the result is exactly 1.
    """
    u2 = np.asarray(u2, float)
    u3 = np.asarray(u3, float)
    if alpha == 1.0:
        return np.ones(np.broadcast(u2, u3).shape)[()]
    b = 1.0 / alpha - 1.0
    # sin(pi u) = sin(pi (1-u)); use the smaller argument for accuracy near u = 1
    s_full = np.sin(np.pi * np.minimum(u2, 1.0 - u2))
    log_s = (
        np.log(np.sin(alpha * np.pi * u2))
        + b * np.log(np.sin((1.0 - alpha) * np.pi * u2))
        - np.log(s_full) / alpha
        - b * np.log(-np.log(u3))
    )
    return np.exp(log_s)[()]


def sample_stable(law: StableLaw, rng: UniformSource, size=None):
    """Draw from the one-sided stable law (Kanter's method, two uniforms per draw)."""
    if size is None:
        u = rng.uniform(2)
        return float(kanter_transform(law.alpha, u[0], u[1]))
    n = int(np.prod(size))
    u = rng.uniform((n, 2))
    return kanter_transform(law.alpha, u[:, 0], u[:, 1]).reshape(size)


def _log_zolotarev_u(alpha, theta, eta):
    """log U on (0, pi); ``eta = pi - theta`` is passed separately for accuracy near pi."""
    p = alpha / (1.0 - alpha)
    log_sin = np.log(np.sin(np.minimum(theta, eta)))
    return (
        p * (np.log(np.sin(alpha * theta)) - log_sin)
        + np.log(np.sin((1.0 - alpha) * theta))
        - log_sin
    )


def _check_pdf_alpha(alpha):
    if alpha == 1.0:
        raise ValueError("alpha = 1 is a point mass and has no density")
    if alpha > ALPHA_PDF_MAX:
        raise AccuracyError(f"density evaluation is refused for alpha > {ALPHA_PDF_MAX}")


def _log_stable_pdf(alpha: float, t: np.ndarray, ctl: EvalControl):
    """Log density for positive ``t`` (1-d array); returns (log g, relative error)."""
    p = alpha / (1.0 - alpha)
    lt = np.log(t)
    logc = -p * lt
    log_pref = math.log(alpha / (math.pi * (1.0 - alpha))) - lt / (1.0 - alpha)

    # split point: c U(theta) = 1, with U increasing on (0, pi)
    u0 = p * math.log(alpha) + math.log1p(-alpha)
    lo = np.zeros_like(t)
    hi = np.full_like(t, math.pi)
    need = logc + u0 < 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        f = logc + _log_zolotarev_u(alpha, mid, math.pi - mid)
        lo = np.where(f < 0.0, mid, lo)
        hi = np.where(f < 0.0, hi, mid)
    split = np.where(need, 0.5 * (lo + hi), 0.0)

    # integrand scaled by exp(-log_ref) to keep values O(1): the peak value
    # of U exp(-cU) is exp(-1)/c
    log_ref = -1.0 - logc
    nt = t.size

    def integrand(x, idx):
        ti = idx % nt
        right = idx >= nt
        theta = np.where(right[:, None], math.pi - x, x)
        eta = np.where(right[:, None], x, math.pi - x)
        lu = _log_zolotarev_u(alpha, theta, eta)
        return np.exp(lu - np.exp(logc[ti][:, None] + lu) - log_ref[ti][:, None])

    a = np.zeros(2 * nt)
    b = np.concatenate([split, math.pi - split])
    vals, errs = tanh_sinh(integrand, a, b, rtol=0.01 * ctl.rel_tol)
    total = vals[:nt] + vals[nt:]
    err = errs[:nt] + errs[nt:]
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(total > 0, err / total, 0.0)
        logg = log_pref + log_ref + np.log(total)
    return logg, rel


def stable_pdf(law: StableLaw, t, ctl: EvalControl = DEFAULT_CONTROL):
    """Density ``g^(alpha)(t)`` of the one-sided stable law (zero for ``t <= 0``).

    Zolotarev's formula
    ``alpha t^(1/(alpha-1)) / (pi (1-alpha)) * int_0^pi U exp(-t^(alpha/(alpha-1)) U) dtheta``
    with ``U = (sin(alpha th)/sin th)^(alpha/(1-alpha)) sin((1-alpha) th)/sin th``.
    """
    alpha = law.alpha
    _check_pdf_alpha(alpha)
    t_arr = np.atleast_1d(np.asarray(t, float))
    out = np.zeros(t_arr.shape)
    pos = t_arr > 0
    tp = t_arr[pos]
    vals = np.empty(tp.size)
    # for t >= 1 the series in w = t^-alpha converges fast and the quadrature
    # resolves the peak near pi poorly once alpha is close to 1
    todo = np.ones(tp.size, bool)
    big = np.flatnonzero(tp >= 1.0)
    big = big[np.argsort(tp[big], kind="stable")[::-1]]
    for lo in range(0, big.size, _CHUNK):
        part = big[lo:lo + _CHUNK]
        lw = -alpha * np.log(tp[part])
        m, ok = _wright_series(alpha, np.exp(lw), ctl)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals[part[ok]] = alpha * m[ok] * np.exp((1.0 + 1.0 / alpha) * lw[ok])
        todo[part[ok]] = False
    rest = np.flatnonzero(todo)
    for lo in range(0, rest.size, _CHUNK):
        part = rest[lo:lo + _CHUNK]
        logg, rel = _log_stable_pdf(alpha, tp[part], ctl)
        if np.any(rel > ctl.rel_tol):
            raise AccuracyError("stable density quadrature did not converge", value=np.exp(logg), bound=rel)
        vals[part] = np.exp(logg)
    out[pos] = vals
    return float(out[0]) if np.ndim(t) == 0 else out


def stable_pdf_saddlepoint(law: StableLaw, t):
    """Small-``t`` saddle-point approximation to the one-sided stable density."""
    a = law.alpha
    if not (0.0 < a < 1.0):
        raise ValueError("saddle-point form needs 0 < alpha < 1")
    t = np.asarray(t, float)
    r = t / a
    val = (
        r ** ((a - 2.0) / (2.0 - 2.0 * a))
        * np.exp(-(1.0 - a) * r ** (-a / (1.0 - a)))
        / math.sqrt(2.0 * math.pi * (1.0 - a) * a)
    )
    return float(val) if val.ndim == 0 else val


def stable_moment(law: StableLaw, order: float) -> float:
    """``E S**order``: ``Gamma(1 - order/alpha) / Gamma(1 - order)`` below ``alpha``, else inf.

    The degenerate ``alpha = 1`` law has every moment equal to 1.
    """
    a = law.alpha
    if order == 0 or a == 1.0:
        return 1.0
    if order >= a:
        return math.inf
    return math.exp(special.gammaln(1.0 - order / a) - special.gammaln(1.0 - order)) * (
        special.gammasgn(1.0 - order / a) * special.gammasgn(1.0 - order)
    )


def stable_log_moment(law: StableLaw, k: int) -> float:
    """Raw log-moment ``E (ln S)**k`` for ``k`` in 1..4 (closed forms)."""
    nu = law.alpha
    C = EULER_GAMMA
    pi2 = math.pi**2
    if k == 1:
        return C * (1.0 / nu - 1.0)
    if k == 2:
        return (1.0 / nu - 1.0) ** 2 * C**2 + pi2 / 6.0 * (1.0 / nu**2 - 1.0)
    if k == 3:
        return (
            -2.0 * (nu - 1.0) ** 3 * C**3
            + C * pi2 * (nu - 1.0) ** 2 * (1.0 + nu)
            - 4.0 * (nu**3 - 1.0) * ZETA3
        ) / (2.0 * nu**3)
    if k == 4:
        inner = (
            60.0 * C**4 * (nu - 1.0) ** 3
            - 60.0 * C**2 * pi2 * (nu - 1.0) ** 2 * (1.0 + nu)
            + pi2**2 * (nu - 3.0) * (1.0 + nu) * (3.0 + nu)
            + 480.0 * C * (nu**3 - 1.0) * ZETA3
        )
        return (1.0 / nu**3 - 1.0 / nu**4) * inner / 60.0
    raise ValueError(f"log-moments are provided for k = 1..4, got {k}")


def _wright_series(nu, w, ctl):
    """M-Wright series for a 1-d array of w > 0; returns (value, ok mask).

    The number of terms is set by the largest ``w``, since every term grows
    with ``w``.
    """
    k = np.arange(ctl.max_terms, dtype=float)
    s = np.sin(np.pi * nu * (k + 1.0))
    lg = special.gammaln(nu * (k + 1.0))
    lf = special.gammaln(k + 1.0)
    with np.errstate(divide="ignore"):
        base = lg - lf + np.log(np.abs(s)) - math.log(math.pi)
    top = k * math.log(w.max()) + base
    keep = np.flatnonzero(top >= top.max() - 60.0)
    nk = min(ctl.max_terms, int(keep[-1]) + 17)
    k, lg, lf, base, s = k[:nk], lg[:nk], lf[:nk], base[:nk], s[:nk]
    sign = np.where(k % 2 == 0, 1.0, -1.0) * np.sign(s)

    lw = np.log(w)[:, None]
    lm = k * lw + base
    lmax = lm.max(axis=1, keepdims=True)
    converged = lm[:, -1] < lmax[:, 0] - 46.0
    with np.errstate(over="ignore", invalid="ignore"):
        mag = np.exp(lm - lmax)
        scale = np.exp(lmax[:, 0])
        value = (mag * sign).sum(axis=1) * scale
        bound = np.finfo(float).eps * (mag * (4.0 + np.abs(k * lw) + lg + lf)).sum(axis=1) * scale
        ok = converged & (lmax[:, 0] < 700.0) & (bound <= 0.01 * ctl.rel_tol * np.abs(value))
    return value, ok


def wright_m(nu: float, w, ctl: EvalControl = DEFAULT_CONTROL):
    """M-Wright function ``M_nu(w) = sum_k (-w)^k / (k! Gamma(1 - nu (k+1)))`` for ``w >= 0``.

    It is the density of ``S**-nu`` for ``S`` one-sided ``nu``-stable, so
    ``M_nu(w) = w**(-1-1/nu) g_nu(w**(-1/nu)) / nu``; that identity is used
    wherever the series loses accuracy.
    """
    if not (0.0 < nu < 1.0):
        raise ValueError(f"nu must lie in (0, 1), got {nu}")
    w_arr = np.atleast_1d(np.asarray(w, float))
    if np.any(w_arr < 0):
        raise ValueError("wright_m is defined for w >= 0")
    out = np.zeros(w_arr.shape)
    flat = w_arr.ravel()
    res = out.ravel()
    zero = flat == 0.0
    res[zero] = float(special.rgamma(1.0 - nu))
    pos = np.flatnonzero(~zero)
    # sort so each chunk covers a narrow range of w and needs few terms
    pos = pos[np.argsort(flat[pos], kind="stable")]
    for lo in range(0, pos.size, _CHUNK):
        part = pos[lo:lo + _CHUNK]
        val, ok = _wright_series(nu, flat[part], ctl)
        res[part[ok]] = val[ok]
        rest = part[~ok]
        if rest.size:
            _check_pdf_alpha(nu)
            lw = np.log(flat[rest])
            logg, rel = _log_stable_pdf(nu, np.exp(-lw / nu), ctl)
            if np.any(rel > ctl.rel_tol):
                raise AccuracyError("M-Wright evaluation did not converge", bound=rel)
            res[rest] = np.exp(logg - (1.0 + 1.0 / nu) * lw) / nu
    out = res.reshape(w_arr.shape)
    return float(out[0]) if np.ndim(w) == 0 else out


def wright_m_mixture(nu: float, log_kernel, nbatch: int, ctl: EvalControl = DEFAULT_CONTROL):
    """Batched ``int_0^inf M_nu(w) exp(log_kernel(w, i)) dw`` for ``i < nbatch``.

    ``log_kernel(w, idx)`` receives ``w`` of shape ``(len(idx), m)``. Each
    kernel should make the product unimodal in ``w``. The integrand is
    located on a logarithmic grid, cut where it has fallen 60 e-folds below
    its peak, and integrated in two tanh-sinh pieces either side of the peak.
    Returns ``(value, error)`` arrays.
    """
    idx_all = np.arange(nbatch)
    grid = np.logspace(-10, 4, 561)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lm = np.log(wright_m(nu, grid, ctl))
        lk = np.asarray(log_kernel(np.broadcast_to(grid, (nbatch, grid.size)), idx_all), float)
        lf = np.where(np.isfinite(lm) & np.isfinite(lk), lm + lk, -np.inf)
    i_peak = np.argmax(lf, axis=1)
    peak = lf[idx_all, i_peak]
    live = np.isfinite(peak)
    # first grid point past the peak where the integrand is negligible
    below = (np.arange(grid.size) > i_peak[:, None]) & (lf < peak[:, None] - 60.0)
    j_hi = np.where(below.any(axis=1), below.argmax(axis=1), grid.size - 1)
    w_hi = grid[j_hi]
    w_peak = grid[i_peak]
    peak = np.where(live, peak, 0.0)

    def integrand(x, idx):
        b = idx % nbatch
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            m = wright_m(nu, x.ravel(), ctl).reshape(x.shape)
            vals = m * np.exp(np.asarray(log_kernel(x, b), float) - peak[b][:, None])
        return np.where(m > 0, vals, 0.0)

    a = np.concatenate([np.zeros(nbatch), w_peak])
    b = np.concatenate([w_peak, w_hi])
    vals, errs = tanh_sinh(integrand, a, b, rtol=0.01 * ctl.rel_tol)
    scale = np.where(live, np.exp(peak), 0.0)
    total = (vals[:nbatch] + vals[nbatch:]) * scale
    err = (errs[:nbatch] + errs[nbatch:]) * scale
    return total, err


def wright_m_mixture_panels(nu: float, log_kernel, nbatch: int, w_lo: float, w_hi: float,
                            ctl: EvalControl = DEFAULT_CONTROL, ratio: float = 1.08):
    """Batched M-Wright mixture on shared Gauss-Legendre panels over ``[0, w_hi]``.

    Panels are geometric from ``w_lo`` upward, so every kernel sees panels a
    few percent wide around its peak. ``M_nu`` is evaluated once per node and
    reused for all kernels. Two rules (24 and 48 nodes per panel) give the
    error estimate. Returns ``(value, error)`` arrays.
    """
    npan = max(1, int(math.ceil(math.log(w_hi / w_lo) / math.log(ratio))))
    edges = np.concatenate([[0.0], np.geomspace(w_lo, w_hi, npan + 1)])
    a, b = edges[:-1], edges[1:]
    results = []
    for q in (24, 48):
        xg, wg = np.polynomial.legendre.leggauss(q)
        nodes = (0.5 * (b - a)[:, None] * (xg + 1.0) + a[:, None]).ravel()
        weights = (0.5 * (b - a)[:, None] * wg).ravel()
        m = wright_m(nu, nodes, ctl)
        pos = m > 0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lk = np.asarray(log_kernel(np.broadcast_to(nodes[pos], (nbatch, int(pos.sum()))),
                                       np.arange(nbatch)), float)
            terms = lk + np.log(m[pos] * weights[pos])
        peak = terms.max(axis=1)
        live = np.isfinite(peak)
        peak = np.where(live, peak, 0.0)
        with np.errstate(invalid="ignore"):
            s = np.exp(terms - peak[:, None]).sum(axis=1)
        results.append(np.where(live, s * np.exp(peak), 0.0))
    coarse, fine = results
    return fine, np.abs(fine - coarse)


def wright_m_integral(nu: float, log_kernel, ctl: EvalControl = DEFAULT_CONTROL) -> float:
    """``int_0^inf M_nu(w) exp(log_kernel(w)) dw`` for a single unimodal kernel."""
    total, err = wright_m_mixture(nu, lambda w, idx: log_kernel(w), 1, ctl)
    if err[0] > ctl.rel_tol * abs(total[0]):
        raise AccuracyError("M-Wright mixture integral did not converge", value=total[0], bound=err[0])
    return float(total[0])
