"""Special functions: Gamma, modified Bessel I_a of real order a > -1,
Laguerre polynomials and the orthonormalized Laguerre functions.

Everything here is scalar-in-order, vectorized-in-argument.  The Bessel
evaluation is assembled in log space (power series below a crossover,
large-argument expansion with the reflection term above it) so that the
kernel code can work with arguments spanning ~15 orders of magnitude.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln
from scipy.special import gamma as _scipy_gamma

__all__ = [
    "gamma_fn",
    "log_gamma",
    "bessel_i",
    "log_bessel_i",
    "log_bessel_i_from_log",
    "laguerre_poly",
    "laguerre_fn",
]

_LOG_MAX = 709.0  # float64 overflow threshold for exp

# Below the crossover the positive power series is summed (no cancellation,
# ~1e-14 relative); above it the large-argument expansion converges to well
# under 1e-12.  The expansion alone cannot reach 1e-10 near x = 10 (its
# reflection term is only ~e^{-2x} relative), hence the high crossover.
_SERIES_TERMS = 130


def _check_order(a: float) -> float:
    a = float(a)
    if not a > -1.0:
        raise ValueError(f"Bessel/Laguerre order must be > -1, got {a}")
    return a


def gamma_fn(x):
    """Gamma for positive real argument."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("gamma_fn requires positive argument")
    return _scipy_gamma(x)


def log_gamma(x):
    return gammaln(np.asarray(x, dtype=float))


def _series_crossover(a: float) -> float:
    return max(30.0, 2.0 * a * a)


def _log_i_series(a: float, logx: np.ndarray) -> np.ndarray:
    """log I_a via the ascending series.

    All terms are positive (no cancellation), so the sum is accumulated in
    linear space after factoring out the leading term (x/2)^a / Gamma(a+1):
    the remaining series is bounded by ~e^x and cannot overflow below the
    crossover.
    """
    x2 = np.exp(2.0 * logx)  # x^2
    xmax = math.sqrt(float(np.max(x2))) if x2.size else 0.0
    n_terms = min(_SERIES_TERMS, int(0.5 * xmax + 7.0 * math.sqrt(0.5 * xmax + 4.0)) + 12)
    s = np.ones_like(x2)
    term = np.ones_like(x2)
    for k in range(1, n_terms):
        term = term * x2 / (4.0 * k * (k + a))
        s += term
    return a * (logx - np.log(2.0)) - gammaln(a + 1.0) + np.log(s)


def _asymptotic_coeffs(a: float, n: int = 24) -> np.ndarray:
    """Coefficients of the large-argument expansion of I_a.

    c[k] = prod_{j=1..k} (4a^2 - (2j-1)^2) / (k! 8^k), c[0] = 1.
    """
    mu = 4.0 * a * a
    c = np.empty(n)
    c[0] = 1.0
    for kk in range(1, n):
        c[kk] = c[kk - 1] * (mu - (2 * kk - 1) ** 2) / (8.0 * kk)
    return c


def _log_i_asymptotic(a: float, x: np.ndarray) -> np.ndarray:
    """log I_a for large x: e^x expansion plus the e^{-x} reflection term.

    I_a(x) = e^x (2 pi x)^{-1/2} [ S1(x) - 2 sin(a pi) e^{-2x} S2(x) ],
    S1 = sum (-1)^k c_k x^{-k}, S2 = sum c_k x^{-k}.
    """
    c = _asymptotic_coeffs(a)
    inv = 1.0 / x
    s1 = np.zeros_like(x)
    s2 = np.zeros_like(x)
    term = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    for kk, ck in enumerate(c):
        t = ck * term
        # stop once terms start growing (asymptotic series); mask per point
        live = np.abs(t) <= prev
        s1 += np.where(live, t if kk % 2 == 0 else -t, 0.0)
        s2 += np.where(live, t, 0.0)
        prev = np.where(live, np.abs(t), prev)
        term = term * inv
    refl = 2.0 * np.sin(a * np.pi) * np.exp(-2.0 * x) * s2
    return x - 0.5 * np.log(2.0 * np.pi * x) + np.log(s1 - refl)


def log_bessel_i(a, x):
    """log I_a(x) for x > 0, overflow-safe.

    exp(log_bessel_i(a, x)) agrees with bessel_i wherever the latter is
    representable.
    """
    a = _check_order(a)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("log_bessel_i requires x > 0")
    return log_bessel_i_from_log(a, np.log(x))


def log_bessel_i_from_log(a, logx):
    """log I_a(e^logx); accepts the log of the argument directly.

    Needed by the kernel code, where sqrt(xi eta)/sinh(t) is formed in log
    space and may not be representable as a float.
    """
    a = _check_order(a)
    logx = np.asarray(logx, dtype=float)
    scalar = logx.ndim == 0
    logx = np.atleast_1d(logx)
    out = np.empty_like(logx)

    cross = _series_crossover(a)
    tiny = logx < -12.0  # x < ~6e-6: two-term series suffices to ~1e-15
    big = logx > np.log(cross)
    mid = ~(tiny | big)

    if np.any(tiny):
        lx = logx[tiny]
        x2 = np.exp(2.0 * lx)
        out[tiny] = (
            a * (lx - np.log(2.0))
            - gammaln(a + 1.0)
            + np.log1p(x2 / (4.0 * (a + 1.0)) * (1.0 + x2 / (8.0 * (a + 2.0))))
        )
    if np.any(mid):
        out[mid] = _log_i_series(a, logx[mid])
    if np.any(big):
        out[big] = _log_i_asymptotic(a, np.exp(logx[big]))
    return out[0] if scalar else out


def bessel_i(a, x):
    """Modified Bessel function of the first kind, real order a > -1.

    Raises OverflowError when the result exceeds the floating range; use
    log_bessel_i then.  x = 0 is allowed only for a >= 0.
    """
    a = _check_order(a)
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError("bessel_i requires x >= 0")
    if np.any(x_arr == 0):
        if a < 0:
            raise ValueError("bessel_i at x = 0 requires a >= 0")
        base = np.where(x_arr == 0, 1.0 if a == 0 else 0.0, np.nan)
        pos = x_arr > 0
        res = np.array(base, dtype=float)
        if np.any(pos):
            res[pos] = bessel_i(a, x_arr[pos])
        return res if res.ndim else float(res)
    logv = log_bessel_i(a, x_arr)
    if np.any(np.asarray(logv) > _LOG_MAX):
        raise OverflowError("bessel_i overflows float64; use log_bessel_i")
    out = np.exp(logv)
    return float(out) if np.ndim(x) == 0 else out


def laguerre_poly(k: int, a, x):
    """Laguerre polynomial L_k^a(x) by the three-term recurrence.

    Exact for k = 0, 1; the recurrence avoids the cancellation that the
    explicit sum suffers from for k >= 5.
    """
    if k < 0 or k != int(k):
        raise ValueError("degree k must be a nonnegative integer")
    a = _check_order(a)
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if k == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = 1.0 + a - x
    for n in range(1, int(k)):
        p, p_prev = ((2 * n + 1 + a - x) * p - (n + a) * p_prev) / (n + 1.0), p
    return p if p.ndim else float(p)


def laguerre_fn(k: int, a, x):
    """Orthonormalized Laguerre function: the L^2(R_+) basis element built
    from L_k^a with the x^{a/2} e^{-x/2} weight."""
    a = _check_order(a)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("laguerre_fn requires x > 0")
    lognorm = 0.5 * (gammaln(k + 1.0) - gammaln(k + a + 1.0))
    val = laguerre_poly(k, a, x) * np.exp(lognorm + 0.5 * a * np.log(x) - 0.5 * x)
    return val if np.ndim(x) else float(val)
