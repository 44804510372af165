"""Scalar special functions: Mittag-Leffler families, erfc, zeta constants.

Power series are summed term by term in the log domain, together with a
running bound on the rounding error of the sum. When that bound shows the
alternating series has cancelled too much (large negative arguments), the
one- and two-parameter functions switch to a positive real-line integral
representation evaluated by tanh-sinh quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import AccuracyError
from .quadrature import tanh_sinh

__all__ = [
    "EvalControl",
    "DEFAULT_CONTROL",
    "EULER_GAMMA",
    "ZETA2",
    "ZETA3",
    "zeta",
    "erfc",
    "mittag_leffler",
    "mittag_leffler_two_param",
    "mittag_leffler_deriv",
    "log_gamma_series_coeffs",
]

EULER_GAMMA = 0.57721566490153286
ZETA2 = math.pi**2 / 6
ZETA3 = 1.2020569031595942

_EPS = np.finfo(float).eps
# terms this far (in log units) below the largest one are dropped
_LOG_NEGLIGIBLE = 46.0
_CHUNK = 64


@dataclass(frozen=True)
class EvalControl:
    """Truncation control for series and quadrature evaluations."""

    rel_tol: float = 1e-10
    max_terms: int = 2000

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-3):
            raise ValueError(f"rel_tol must lie in (0, 1e-3], got {self.rel_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 16:
            raise ValueError(f"max_terms must be an integer >= 16, got {self.max_terms}")


DEFAULT_CONTROL = EvalControl()


def zeta(k: int) -> float:
    """Riemann zeta at an integer ``k >= 2``."""
    if int(k) != k or k < 2:
        raise ValueError("zeta is only provided for integers k >= 2")
    return float(special.zeta(k, 1))


def erfc(x):
    """Complementary error function, ``2/sqrt(pi) * int_x^inf exp(-u^2) du``."""
    out = special.erfc(x)
    return float(out) if np.ndim(out) == 0 else out


def _sum_series(logmag_fn, negative: bool, ctl: EvalControl):
    """Sum ``sum_k sign_k exp(logmag_k)`` with a rounding-error bound.

    ``logmag_fn(k)`` returns ``(logmag, sign, scale)`` for an integer array
    ``k``; ``scale`` is the magnitude of the log-domain quantities entering
    each term, so that ``eps * scale`` bounds its relative error. When
    ``negative`` is set the sign additionally alternates as ``(-1)^k``.

    Returns ``(value, bound, nterms)``.
    """
    logs, signs, scales = [], [], []
    start = 0
    lmax = -np.inf
    while True:
        k = np.arange(start, start + _CHUNK)
        lm, sg, sc = logmag_fn(k)
        if negative:
            sg = sg * np.where(k % 2 == 0, 1.0, -1.0)
        logs.append(lm)
        signs.append(sg)
        scales.append(sc)
        lmax = max(lmax, float(np.max(lm)))
        start += _CHUNK
        tail = lm[-8:]
        if np.all(tail < lmax - _LOG_NEGLIGIBLE) and np.all(np.diff(tail) <= 0):
            break
        if start >= ctl.max_terms:
            lm_all = np.concatenate(logs)
            partial = math.fsum(np.concatenate(signs) * np.exp(lm_all - lmax)) * math.exp(min(lmax, 709.0))
            raise AccuracyError(
                f"series did not converge within {ctl.max_terms} terms",
                value=partial,
                bound=math.exp(min(float(lm_all[-1]), 709.0)),
            )
    lm = np.concatenate(logs)
    sg = np.concatenate(signs)
    sc = np.concatenate(scales)
    if not np.isfinite(lmax):
        return 0.0, 0.0, lm.size
    if lmax > 709.0:
        raise AccuracyError("series terms overflow double precision", value=math.inf, bound=math.inf)
    mag = np.exp(lm)
    value = math.fsum(sg * mag)
    bound = _EPS * math.fsum(mag * (4.0 + sc))
    return value, bound, lm.size


def _ml_series(alpha: float, beta: float, z: float, ctl: EvalControl):
    logz = math.log(abs(z))

    def terms(k):
        arg = alpha * k + beta
        lg = special.gammaln(arg)
        lm = k * logz - lg
        return lm, np.ones_like(lm), np.abs(k * logz) + np.abs(lg)

    return _sum_series(terms, z < 0, ctl)


def _ml_integral(alpha: float, beta: float, x: float, ctl: EvalControl) -> float:
    """``E_{alpha,beta}(-x)`` for ``0 < alpha < 1``, ``beta < 1 + alpha``, ``x > 0``.

    Uses the representation
    ``int_0^inf r^((1-beta)/alpha) exp(-r^(1/alpha)) (r sin(pi(1-beta))
    + x sin(pi(1-beta+alpha))) / (r^2 + 2 r x cos(alpha pi) + x^2) dr / (alpha pi)``,
    valid on the negative real axis.
    """
    s1 = math.sin(math.pi * (1.0 - beta))
    s2 = math.sin(math.pi * (1.0 - beta + alpha))
    cs = math.cos(alpha * math.pi)
    power = (1.0 - beta) / alpha
    rmax = 750.0**alpha

    def kernel(r, idx):
        with np.errstate(divide="ignore"):
            lr = np.log(r)
        core = np.exp(power * lr - np.exp(lr / alpha))
        return core * (r * s1 + x * s2) / (r * r + 2.0 * r * x * cs + x * x)

    if x < rmax:
        a, b = np.array([0.0, x]), np.array([x, rmax])
    else:
        a, b = np.array([0.0]), np.array([rmax])
    vals, errs = tanh_sinh(kernel, a, b, rtol=0.01 * ctl.rel_tol)
    value = math.fsum(vals) / (alpha * math.pi)
    err = float(np.sum(errs)) / (alpha * math.pi)
    if err > ctl.rel_tol * abs(value):
        raise AccuracyError("Mittag-Leffler quadrature did not converge", value=value, bound=err)
    return value


def _scalar_or_map(fn, z):
    if np.ndim(z) == 0:
        return fn(float(z))
    arr = np.asarray(z, float)
    return np.array([fn(v) for v in arr.ravel()]).reshape(arr.shape)


def mittag_leffler_two_param(alpha: float, beta: float, z, ctl: EvalControl = DEFAULT_CONTROL):
    """Two-parameter Mittag-Leffler function ``sum_n z^n / Gamma(alpha n + beta)``.

    Real arguments of either sign are accepted. For negative arguments
    where the alternating series loses too many digits, the integral
    representation is used (requires ``alpha < 1`` and ``beta < 1 + alpha``);
    outside that region an :class:`AccuracyError` is raised.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")

    def one(zv):
        if zv == 0.0:
            return float(special.rgamma(beta))
        if alpha == 1.0 and beta == 1.0:
            return math.exp(zv)
        fallback = zv < 0 and alpha < 1.0 and beta < 1.0 + alpha
        try:
            value, bound, _ = _ml_series(alpha, beta, zv, ctl)
        except AccuracyError:
            if not fallback:
                raise
            return _ml_integral(alpha, beta, -zv, ctl)
        if bound <= 0.1 * ctl.rel_tol * abs(value):
            return value
        if fallback:
            return _ml_integral(alpha, beta, -zv, ctl)
        raise AccuracyError(
            f"E_{{{alpha},{beta}}}({zv}) cannot be evaluated to rel_tol={ctl.rel_tol}",
            value=value,
            bound=bound,
        )

    return _scalar_or_map(one, z)


def mittag_leffler(nu: float, z, ctl: EvalControl = DEFAULT_CONTROL):
    """Mittag-Leffler function ``E_nu(z) = sum_n z^n / Gamma(nu n + 1)``, ``0 < nu <= 1``."""
    if not (0.0 < nu <= 1.0):
        raise ValueError(f"nu must lie in (0, 1], got {nu}")
    return mittag_leffler_two_param(nu, 1.0, z, ctl)


def mittag_leffler_deriv(nu: float, n: int, z, ctl: EvalControl = DEFAULT_CONTROL):
    """``n``-th derivative of ``E_nu`` at ``z <= 0``.

    Term-wise differentiated series
    ``sum_k (k+n)!/k! z^k / Gamma(nu (k+n) + 1)``; when it cancels too
    badly, the Laplace-type representation
    ``E_nu^(n)(-x) = int_0^inf w^n M_nu(w) exp(-x w) dw`` over the
    M-Wright density is integrated instead.
    """
    if not (0.0 < nu <= 1.0):
        raise ValueError(f"nu must lie in (0, 1], got {nu}")
    if int(n) != n or n < 0:
        raise ValueError("n must be a nonnegative integer")
    n = int(n)
    if n == 0:
        return mittag_leffler(nu, z, ctl)

    def one(zv):
        if zv > 0:
            raise ValueError("mittag_leffler_deriv requires z <= 0")
        if nu == 1.0:
            return math.exp(zv)
        if zv == 0.0:
            return math.factorial(n) * float(special.rgamma(nu * n + 1.0))
        logz = math.log(-zv)

        def terms(k):
            a = special.gammaln(k + n + 1.0)
            b = special.gammaln(k + 1.0)
            c = special.gammaln(nu * (k + n) + 1.0)
            lm = a - b - c + k * logz
            return lm, np.ones_like(lm), a + b + c + np.abs(k * logz)

        try:
            value, bound, _ = _sum_series(terms, True, ctl)
        except AccuracyError:
            value, bound = math.nan, math.inf
        if bound <= 0.1 * ctl.rel_tol * abs(value):
            return value
        from .stable import wright_m_integral

        x = -zv
        return wright_m_integral(nu, lambda w: n * np.log(w) - x * w, ctl)

    return _scalar_or_map(one, z)


def log_gamma_series_coeffs(nu: float, k_max: int) -> np.ndarray:
    """Taylor coefficients of ``ln Gamma(1 - s/nu) - ln Gamma(1 - s)`` in ``s``.

    Entry ``k`` of the returned array multiplies ``s**k`` (entry 0 is 0):
    ``C (1/nu - 1)`` for ``k = 1`` and ``zeta(k)/k (1/nu^k - 1)`` beyond.
    """
    if int(k_max) != k_max or k_max < 2:
        raise ValueError("k_max must be an integer >= 2")
    if not (0.0 < nu <= 1.0):
        raise ValueError(f"nu must lie in (0, 1], got {nu}")
    out = np.zeros(int(k_max) + 1)
    out[1] = EULER_GAMMA * (1.0 / nu - 1.0)
    for k in range(2, int(k_max) + 1):
        out[k] = zeta(k) / k * (nu**-k - 1.0)
    return out
