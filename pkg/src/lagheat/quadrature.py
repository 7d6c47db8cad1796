"""Adaptive panelled Gauss-Legendre quadrature for log-space integrands.

The kernel pairings have integrands of the form exp(log kernel + log piece):
sharply peaked around eta ~ xi, with an integrable eta^{a/2} singularity at
the origin and doubly-exponential tails.  The engine works on the log of the
integrand (so underflow is harmless), substitutes eta = u^2 on the panel
block touching 0, and bisects panels until the 10/20-point Gauss estimates
agree to the requested relative tolerance.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

__all__ = ["QuadratureError", "integrate_log_integrand"]

_X10, _W10 = np.polynomial.legendre.leggauss(10)
_X20, _W20 = np.polynomial.legendre.leggauss(20)


class QuadratureError(ArithmeticError):
    """Quadrature failed to converge; carries the worst subinterval."""

    def __init__(self, message, worst_interval=None, error=None):
        super().__init__(message)
        self.worst_interval = worst_interval
        self.error = error


def _panel_estimates(log_f, a, b, transform):
    """(value20, |value20 - value10|) on one panel, evaluated vectorized."""
    h = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    pts = np.concatenate((mid + h * _X10, mid + h * _X20))
    if transform:  # u-substitution: integrate 2u f(u^2) in u
        logv = log_f(pts * pts) + np.log(2.0 * pts)
    else:
        logv = log_f(pts)
    vals = np.exp(np.minimum(logv, 700.0))
    v10 = h * float(np.dot(_W10, vals[:10]))
    v20 = h * float(np.dot(_W20, vals[10:]))
    return v20, abs(v20 - v10)


def _seed_panels(lo, hi, breakpoints, per_decade=2):
    """Initial panel edges: breakpoints plus a geometric fill of wide spans."""
    pts = {lo, hi}
    for b in breakpoints:
        if lo < b < hi:
            pts.add(float(b))
    edges = sorted(pts)
    out = []
    for a, b in zip(edges, edges[1:]):
        if a > 0 and b / a > 10.0:
            n = int(math.ceil(math.log10(b / a) * per_decade))
            geo = np.geomspace(a, b, n + 1)
            out.extend(zip(geo[:-1], geo[1:]))
        else:
            out.append((a, b))
    return out


def integrate_log_integrand(
    log_f,
    lo: float,
    hi: float,
    rtol: float = 1e-6,
    breakpoints=(),
    u_sub_at_zero: bool = True,
    max_panels: int = 2000,
):
    """Integral of exp(log_f) over (lo, hi), lo >= 0, hi finite.

    log_f must accept a positive numpy array and may return -inf.  Returns
    (value, error_estimate).  Raises QuadratureError when the panel budget is
    exhausted before the tolerance is met.
    """
    if hi <= lo:
        return 0.0, 0.0
    jobs = []  # (a, b, transform)
    if lo == 0.0 and u_sub_at_zero:
        # substitute eta = u^2 on the whole interval: the kernel's eta^{a/2}
        # singularity becomes u^{a+1} at 0, and interior peaks survive at
        # sqrt of their location
        bps = tuple(math.sqrt(b) for b in breakpoints if 0.0 < b < hi)
        for a, b in _seed_panels(0.0, math.sqrt(hi), bps):
            jobs.append((a, b, True))
    else:
        for a, b in _seed_panels(lo, hi, breakpoints):
            jobs.append((a, b, False))

    heap = []
    total = 0.0
    err_total = 0.0
    for a, b, tr in jobs:
        v, e = _panel_estimates(log_f, a, b, tr)
        total += v
        err_total += e
        heapq.heappush(heap, (-e, a, b, tr, v))

    n_panels = len(jobs)
    while heap and err_total > rtol * max(abs(total), 1e-300) and n_panels < max_panels:
        neg_e, a, b, tr, v = heapq.heappop(heap)
        e = -neg_e
        if e <= 0:
            heapq.heappush(heap, (neg_e, a, b, tr, v))
            break
        mid = 0.5 * (a + b)
        v1, e1 = _panel_estimates(log_f, a, mid, tr)
        v2, e2 = _panel_estimates(log_f, mid, b, tr)
        total += v1 + v2 - v
        err_total += e1 + e2 - e
        heapq.heappush(heap, (-e1, a, mid, tr, v1))
        heapq.heappush(heap, (-e2, mid, b, tr, v2))
        n_panels += 1

    if err_total > 10.0 * rtol * max(abs(total), 1e-300) and n_panels >= max_panels:
        worst = heap[0]
        raise QuadratureError(
            f"quadrature did not converge: error {err_total:.2e} on total {total:.2e}",
            worst_interval=(worst[1], worst[2]),
            error=-worst[0],
        )
    return total, err_total
