"""Kernel integrals against separable functions, the heat semigroup, the
maximal operator (sup over t, discretized on a log grid with golden-section
refinement), and the centered 1-D Hardy-Littlewood maximal operator.

Evaluations at distinct points are independent pure computations; the
quadrature engine is reentrant and sums term lists in a fixed order, so
results do not depend on scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functions import Box, GridFn, PowerExp, SeparableFunction
from .kernel import TypeMultiIndex, log_h1d
from .quadrature import integrate_log_integrand

__all__ = [
    "TimeGrid",
    "apply_kernel",
    "apply_semigroup",
    "maximal",
    "MaximalResult",
    "hl_maximal_1d",
    "lp_norm",
    "proposition_rhs",
    "critical_exponents_1d",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class TimeGrid:
    """Log-spaced discretization of the supremum over t > 0.

    refinement = number of golden-section passes (4 shrink steps each) run in
    log t around the discrete argmax.
    """

    t_min: float = 1e-4
    t_max: float = 1e2
    points_per_decade: int = 32
    refinement: int = 3

    def __post_init__(self):
        if not (0 < self.t_min < self.t_max):
            raise ValueError("need 0 < t_min < t_max")
        if self.points_per_decade < 16:
            raise ValueError("points per decade must be >= 16")
        if self.refinement < 0:
            raise ValueError("refinement must be >= 0")

    def grid(self) -> np.ndarray:
        decades = math.log10(self.t_max / self.t_min)
        n = max(2, int(round(decades * self.points_per_decade)) + 1)
        return np.geomspace(self.t_min, self.t_max, n)


def _truncation_point(a, t, xi, piece, drop_nats=46.0):
    """Upper integration limit for an unbounded-support piece: where the
    log-integrand has fallen drop_nats below its running maximum."""
    lo, hi = piece.support
    if math.isfinite(hi):
        return hi
    start = max(xi, t, lo, 1.0)
    grid = np.geomspace(max(lo, 1e-12) + 1e-300, start * 4.0, 64)
    best = np.max(log_h1d(a, t, xi, grid) + piece.log_value(grid))
    b = start * 4.0
    for _ in range(60):
        lv = float(log_h1d(a, t, xi, b) + piece.log_value(b))
        best = max(best, lv)
        if lv < best - drop_nats:
            return b
        b *= 2.0
    return b


def kernel_pairing_1d(a, t, xi, piece, rtol: float = 1e-6) -> float:
    """Integral of the 1-D kernel at (xi, .) against one nonnegative piece."""
    lo, hi = piece.support
    lo = max(lo, 0.0)
    hi_cap = _truncation_point(a, t, xi, piece)
    if hi_cap <= lo:
        return 0.0
    # panel seeds: the kernel peaks near eta ~ xi with width ~ sqrt(t xi)
    w = math.sqrt(t * xi)
    breakpoints = [xi - 4 * w, xi - w, xi, xi + w, xi + 4 * w, 2 * t, t]
    breakpoints = [b for b in breakpoints if lo < b < hi_cap]

    def log_f(eta):
        return log_h1d(a, t, xi, eta) + piece.log_value(eta)

    val, _ = integrate_log_integrand(
        log_f, lo, hi_cap, rtol=rtol, breakpoints=breakpoints
    )
    return val


def apply_kernel(
    alpha: TypeMultiIndex,
    t,
    f: SeparableFunction,
    x,
    rtol: float = 1e-6,
    absolute: bool = True,
):
    """Integral of the d-dimensional kernel against |f| at the point x.

    Separability turns the d-dimensional integral into a sum over terms of
    products of 1-D adaptive quadratures (relative tolerance rtol each).
    absolute=False integrates the signed f instead (term coefficients carry
    the signs; the per-piece integrands stay nonnegative), which is what the
    linear semigroup needs.
    """
    if not isinstance(alpha, TypeMultiIndex):
        alpha = TypeMultiIndex(alpha)
    if absolute:
        f = f.absolute()
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if len(x) != alpha.d or f.d != alpha.d:
        raise ValueError("alpha, f and x must share a dimension")
    total = 0.0
    for c, ps in f.terms:
        prod = c
        for i, piece in enumerate(ps):
            if prod == 0.0:
                break
            prod *= kernel_pairing_1d(alpha.alpha[i], float(t), x[i], piece, rtol)
        total += prod
    return total


def apply_semigroup(
    alpha: TypeMultiIndex,
    t,
    f: SeparableFunction,
    x,
    rtol: float = 1e-6,
    absolute: bool = False,
):
    """Heat semigroup at time t: prefactor e^{-t(|alpha|+d)/2} times the
    kernel integral at time t/2.  The semigroup is linear, so it integrates
    the signed f by default."""
    if not isinstance(alpha, TypeMultiIndex):
        alpha = TypeMultiIndex(alpha)
    pref = math.exp(-0.5 * float(t) * (alpha.total + alpha.d))
    return pref * apply_kernel(alpha, 0.5 * float(t), f, x, rtol, absolute=absolute)


@dataclass(frozen=True)
class MaximalResult:
    value: float
    argmax_t: float


def maximal(alpha, f: SeparableFunction, x, grid: TimeGrid | None = None, rtol: float = 1e-6) -> MaximalResult:
    """sup over t of the kernel integral, maximized over the log grid and then
    golden-section refined in log t around the discrete argmax.

    The returned value is the max over every evaluation performed, so it can
    only increase under grid refinement.
    """
    grid = grid or TimeGrid()
    if not isinstance(alpha, TypeMultiIndex):
        alpha = TypeMultiIndex(alpha)
    ts = grid.grid()
    vals = np.array([apply_kernel(alpha, t, f, x, rtol) for t in ts])
    k = int(np.argmax(vals))
    best_v, best_t = float(vals[k]), float(ts[k])

    lo = math.log(ts[max(0, k - 1)])
    hi = math.log(ts[min(len(ts) - 1, k + 1)])
    evaluated = {}

    def g(lt):
        if lt not in evaluated:
            evaluated[lt] = apply_kernel(alpha, math.exp(lt), f, x, rtol)
        return evaluated[lt]

    a_, b_ = lo, hi
    c_ = b_ - _GOLDEN * (b_ - a_)
    d_ = a_ + _GOLDEN * (b_ - a_)
    for _ in range(4 * grid.refinement):
        if g(c_) >= g(d_):
            b_, d_ = d_, c_
            c_ = b_ - _GOLDEN * (b_ - a_)
        else:
            a_, c_ = c_, d_
            d_ = a_ + _GOLDEN * (b_ - a_)
    for lt, v in evaluated.items():
        if v > best_v:
            best_v, best_t = v, math.exp(lt)
    return MaximalResult(value=best_v, argmax_t=best_t)


# ---------------------------------------------------------------------------
# centered Hardy-Littlewood maximal operator (one-dimensional)


def _box_hl(lo, hi, x):
    # exact: for x outside, the optimal radius reaches the far edge
    if lo < x < hi:
        return 1.0
    if x >= hi:
        return (hi - lo) / (2.0 * (x - lo))
    return (hi - lo) / (2.0 * (hi - x))


def _cumulative(f_terms, eta):
    """Integral of sum_i c_i piece_i over (0, eta)."""
    return sum(c * ps[0].integral(0.0, eta) for c, ps in f_terms)


def hl_maximal_1d(f: SeparableFunction, x: float) -> float:
    """Centered 1-D maximal operator: sup_r (1/2r) int_{x-r}^{x+r} |f|,
    with the integration range clipped to (0, inf) and the 2r kept.

    Closed form for a single box; otherwise a log-spaced grid search over r
    with golden-section refinement, using exact segment integrals of the
    pieces.
    """
    if f.d != 1:
        raise ValueError("hl_maximal_1d needs a one-dimensional function")
    f = f.absolute()
    x = float(x)
    if len(f.terms) == 1 and isinstance(f.terms[0][1][0], Box):
        c, (b,) = f.terms[0]
        return c * _box_hl(b.lo, b.hi, x)

    hi_eff = 0.0
    for c, (p,) in f.terms:
        hi_eff = max(hi_eff, p.effective_hi() if isinstance(p, PowerExp) else p.support[1])

    def avg(r):
        lo_ = max(0.0, x - r)
        return (_cumulative(f.terms, x + r) - _cumulative(f.terms, lo_)) / (2.0 * r)

    r_max = max(x + hi_eff, 2.0 * hi_eff, 1e-6)
    rs = np.geomspace(max(x, hi_eff, 1.0) * 1e-9, r_max, 220)
    vals = np.array([avg(r) for r in rs])
    k = int(np.argmax(vals))
    best = float(vals[k])
    a_, b_ = math.log(rs[max(0, k - 1)]), math.log(rs[min(len(rs) - 1, k + 1)])
    c_ = b_ - _GOLDEN * (b_ - a_)
    d_ = a_ + _GOLDEN * (b_ - a_)
    for _ in range(40):
        fc, fd = avg(math.exp(c_)), avg(math.exp(d_))
        best = max(best, fc, fd)
        if fc >= fd:
            b_, d_ = d_, c_
            c_ = b_ - _GOLDEN * (b_ - a_)
        else:
            a_, c_ = c_, d_
            d_ = a_ + _GOLDEN * (b_ - a_)
    # r -> 0 limit recovers |f| at continuity points
    return max(best, float(f.evaluate(np.array([[x]]))[0]))


# ---------------------------------------------------------------------------
# one-dimensional pointwise bound (strong-range machinery)


def critical_exponents_1d(a: float):
    """(p0, p1) for a one-dimensional type parameter in (-1, 0)."""
    if not -1.0 < a < 0.0:
        raise ValueError("critical exponents need a in (-1, 0)")
    p1 = -2.0 / a
    p0 = 2.0 / (2.0 + a)
    return p0, p1


def lp_norm(f: SeparableFunction, p: float) -> float:
    """L^p norm of a separable function (exact per-piece closed forms for a
    single term; otherwise numeric, d = 1 only)."""
    if p <= 0:
        raise ValueError("p must be positive")
    if len(f.terms) == 1:
        c, ps = f.terms[0]
        prod = abs(c) ** p
        for piece in ps:
            prod *= piece.pow_integral(p)
        return prod ** (1.0 / p)
    if f.d != 1:
        raise ValueError("multi-term norms implemented for d = 1 only")
    f = f.absolute()
    lo, hi = f.support_box()
    hi_eff = 0.0
    for c, (piece,) in f.terms:
        hi_eff = max(hi_eff, piece.effective_hi() if isinstance(piece, PowerExp) else piece.support[1])

    def log_fp(eta):
        vals = f.evaluate(eta[:, None])
        with np.errstate(divide="ignore"):
            return p * np.log(vals)

    val, _ = integrate_log_integrand(log_fp, float(lo[0]), float(hi_eff), rtol=1e-8)
    return val ** (1.0 / p)


def proposition_rhs(
    a: float,
    t: float,
    f: SeparableFunction,
    xi: float,
    c: float = 1.0 / 16.0,
    variant: str = "p1",
    norm_value: float | None = None,
) -> float:
    """Right side of the one-dimensional pointwise bound on the kernel
    integral: e^{-c t xi} M_1 f(xi) plus a decaying multiple of either
    xi^{-1/p1} ||f||_{p1} (variant "p1") or xi^{-1/p0} ||f||_{p0,1}
    (variant "lorentz").  For t > 1 the bound is evaluated at t = 1.
    """
    if variant not in ("p1", "lorentz"):
        raise ValueError("variant must be 'p1' or 'lorentz'")
    p0, p1 = critical_exponents_1d(a)
    te = min(float(t), 1.0)
    m1 = hl_maximal_1d(f, xi)
    if norm_value is None:
        if variant == "p1":
            norm_value = lp_norm(f, p1)
        else:
            from .measure import lorentz_norm_separable_1d

            norm_value = lorentz_norm_separable_1d(f, p0)
    power = -1.0 / p1 if variant == "p1" else -1.0 / p0
    return math.exp(-c * te * xi) * m1 + math.exp(-c * xi / te) * xi**power * norm_value
