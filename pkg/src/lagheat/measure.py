"""Distribution functions, decreasing rearrangements, Lorentz /
Lorentz-Zygmund / weak-Orlicz quasinorms, exact product level-set formulas
and Monte Carlo level-set estimation.

Method selection follows one rule: exact box arithmetic for indicators,
closed forms for pure products of coordinate powers, stratified Monte Carlo
(counter-based Philox streams, one per stratum) or deterministic grid
classification otherwise.  Every logarithm that appears in a bound is
log(2 + .), never log(1 + .): the offset feeds fitted-ratio checks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .functions import Box, BoxUnion, NormDivergenceError, SeparableFunction

__all__ = [
    "DistributionCurve",
    "RearrangementCurve",
    "BudgetWarning",
    "dist_fn",
    "rearrange",
    "lorentz_p1_norm",
    "lorentz_zygmund_norm",
    "weak_orlicz_quasinorm",
    "product_levelset_exact",
    "levelset_bound_check",
    "gaussian_tail_levelset",
    "gaussian_tail_curve",
    "simplex_band_curve",
    "lorentz_norm_separable_1d",
    "dist_curve_1d",
    "field_curve_1d",
    "default_s_grid",
    "default_lambda_grid",
    "unit_cube_product_sublevel",
    "unit_cube_product_sublevel_inverse",
]


class BudgetWarning(UserWarning):
    """Sampling budget left a relative standard error above 5% somewhere."""


@dataclass
class DistributionCurve:
    """Sampled superlevel-measure map lambda -> |{F > lambda}|."""

    lam: np.ndarray
    measure: np.ndarray
    stderr: np.ndarray
    method: str

    def __post_init__(self):
        order = np.argsort(self.lam)
        self.lam = np.asarray(self.lam, dtype=float)[order]
        self.measure = np.asarray(self.measure, dtype=float)[order]
        self.stderr = np.asarray(self.stderr, dtype=float)[order]
        rise = np.diff(self.measure)
        slack = 3.0 * (self.stderr[:-1] + self.stderr[1:]) + 1e-12 * (
            1.0 + self.measure[:-1]
        )
        if np.any(rise > slack):
            k = int(np.argmax(rise - slack))
            raise ValueError(
                f"distribution curve increases at lambda={self.lam[k + 1]:g} "
                "beyond its error bars; measurement is defective"
            )

    def at(self, lam):
        """Right-continuous step interpolation of the measure."""
        lam = np.asarray(lam, dtype=float)
        idx = np.searchsorted(self.lam, lam, side="right") - 1
        out = np.where(idx < 0, self.measure[0], self.measure[np.clip(idx, 0, None)])
        return float(out) if out.ndim == 0 else out


@dataclass
class RearrangementCurve:
    """Sampled decreasing rearrangement f*(s) on an increasing s grid."""

    s: np.ndarray
    fstar: np.ndarray
    method: str = "curve"


def default_s_grid(s_min: float = 1e-10, s_max: float = 1e4, per_decade: int = 64):
    n = int(round(math.log10(s_max / s_min) * per_decade)) + 1
    return np.geomspace(s_min, s_max, n)


def default_lambda_grid(lam_min: float = 1e-2, lam_max: float = 1e6, per_decade: int = 8):
    n = int(round(math.log10(lam_max / lam_min) * per_decade)) + 1
    return np.geomspace(lam_min, lam_max, n)


# ---------------------------------------------------------------------------
# exact level-set formulas


def _survival_poly(L, d: int):
    """sum_{k<d} L^k / k!  (survival series of a Gamma(d,1) variable)."""
    L = np.asarray(L, dtype=float)
    out = np.ones_like(L)
    term = np.ones_like(L)
    for k in range(1, d):
        term = term * L / k
        out = out + term
    return out


def unit_cube_product_sublevel(d: int, u):
    """|{x in (0,1)^d : prod x_j < u}| = u * sum_{k<d} ln(1/u)^k / k!."""
    u = np.asarray(u, dtype=float)
    u = np.clip(u, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        L = np.where(u > 0, -np.log(np.maximum(u, 1e-300)), np.inf)
    vals = np.where(u > 0, u * _survival_poly(np.where(u > 0, L, 0.0), d), 0.0)
    return vals if vals.ndim else float(vals)


def unit_cube_product_sublevel_inverse(d: int, s: float) -> float:
    """u with |{x in (0,1)^d : prod x_j < u}| = s, for s in (0, 1)."""
    if not 0.0 < s < 1.0:
        raise ValueError("s must be in (0, 1)")
    lo, hi = 1e-300, 1.0
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if unit_cube_product_sublevel(d, mid) < s:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def product_levelset_exact(d: int, t: float, nu: float) -> float:
    """Exact measure of {x in (0,t)^d : prod x_j^{-1} > nu}.

    Scales to the unit cube and applies the closed sublevel form; the whole
    cube qualifies once nu <= t^{-d}.
    """
    if d < 1 or t <= 0 or nu <= 0:
        raise ValueError("need d >= 1, t > 0, nu > 0")
    u = min(1.0, 1.0 / (t**d * nu))
    return t**d * float(unit_cube_product_sublevel(d, u))


def levelset_bound_check(d: int, t: float, nu: float):
    """Ratio of the exact level-set measure to the reference expression
    nu^{-1} [log(2 + t^d nu)]^{d-1}.

    The same expression carries both the upper and (for t^d nu >= 1) the
    lower comparison, so the function returns (upper_ratio, lower_ratio,
    lower_applicable): upper_ratio must stay bounded, lower_ratio must stay
    above a positive constant when applicable.
    """
    exact = product_levelset_exact(d, t, nu)
    ref = (1.0 / nu) * math.log(2.0 + t**d * nu) ** (d - 1)
    ratio = exact / ref
    applicable = t**d * nu >= 1.0
    return ratio, (ratio if applicable else None), applicable


# ---------------------------------------------------------------------------
# Monte Carlo machinery


def _stratified_uniform(lows, highs, n, seed, key_offset=0):
    """Stratified uniform samples in one box with per-stratum Philox streams.

    Returns (points, stratum_index, n_strata); strata are an m^d grid with m
    chosen so each stratum receives >= ~32 points.  Each stratum draws from
    Generator(Philox(key=seed, counter=stratum)), so the result does not
    depend on execution order.
    """
    lows = np.asarray(lows, dtype=float)
    highs = np.asarray(highs, dtype=float)
    d = len(lows)
    m = max(1, int((n / 32.0) ** (1.0 / d)))
    n_strata = m**d
    base, extra = divmod(n, n_strata)
    pts = np.empty((n, d))
    idx = np.empty(n, dtype=np.int64)
    pos = 0
    edges = [np.linspace(lows[i], highs[i], m + 1) for i in range(d)]
    for s in range(n_strata):
        cnt = base + (1 if s < extra else 0)
        if cnt == 0:
            continue
        rng = np.random.Generator(
            np.random.Philox(key=seed, counter=[0, 0, key_offset, s])
        )
        cell = np.unravel_index(s, (m,) * d)
        u = rng.random((cnt, d))
        for i in range(d):
            lo, hi = edges[i][cell[i]], edges[i][cell[i] + 1]
            pts[pos : pos + cnt, i] = lo + (hi - lo) * u[:, i]
        idx[pos : pos + cnt] = s
        pos += cnt
    return pts, idx, n_strata


def _mc_curve(evaluate, boxes: BoxUnion, lambdas, budget, seed):
    """Stratified MC estimate of |{F > lambda}| over a box union."""
    lambdas = np.asarray(lambdas, dtype=float)
    vols = np.prod(boxes.highs - boxes.lows, axis=1)
    total_vol = vols.sum()
    measure = np.zeros(len(lambdas))
    var = np.zeros(len(lambdas))
    for b, (lo, hi, vol) in enumerate(zip(boxes.lows, boxes.highs, vols)):
        n_b = max(64, int(round(budget * vol / total_vol)))
        pts, strata, n_strata = _stratified_uniform(lo, hi, n_b, seed, key_offset=b)
        vals = np.asarray(evaluate(pts), dtype=float)
        above = vals[:, None] > lambdas[None, :]
        counts = np.zeros((n_strata, len(lambdas)))
        totals = np.bincount(strata, minlength=n_strata).astype(float)
        for j in range(len(lambdas)):
            counts[:, j] = np.bincount(strata, weights=above[:, j], minlength=n_strata)
        occupied = totals > 0
        p = counts[occupied] / totals[occupied, None]
        w = vol / occupied.sum()
        measure += (w * p).sum(axis=0)
        var += (w**2 * p * (1.0 - p) / totals[occupied, None]).sum(axis=0)
    return measure, np.sqrt(var)


# ---------------------------------------------------------------------------
# deterministic grid classification


def _grid_curve(evaluate, lows, highs, lambdas, resolution=200, log_axes=True, refine=3):
    """Deterministic level-set measure: classify cells by corner values and
    bisect straddling cells; reported error is half the unresolved volume."""
    lows = np.asarray(lows, dtype=float)
    highs = np.asarray(highs, dtype=float)
    d = len(lows)
    lambdas = np.asarray(lambdas, dtype=float)
    axes = []
    for i in range(d):
        if log_axes and lows[i] > 0:
            axes.append(np.geomspace(lows[i], highs[i], resolution + 1))
        else:
            axes.append(np.linspace(lows[i], highs[i], resolution + 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    vertex_vals = evaluate(np.stack([m.ravel() for m in mesh], axis=1)).reshape(
        mesh[0].shape
    )
    # cell corner extrema
    vmin = vertex_vals.copy()
    vmax = vertex_vals.copy()
    for i in range(d):
        sl_lo = [slice(None)] * d
        sl_hi = [slice(None)] * d
        sl_lo[i] = slice(0, -1)
        sl_hi[i] = slice(1, None)
        vmin = np.minimum(vmin[tuple(sl_lo)], vmin[tuple(sl_hi)])
        vmax = np.maximum(vmax[tuple(sl_lo)], vmax[tuple(sl_hi)])
    cell_lows = np.stack(
        [np.meshgrid(*[ax[:-1] for ax in axes], indexing="ij")[i].ravel() for i in range(d)],
        axis=1,
    )
    cell_highs = np.stack(
        [np.meshgrid(*[ax[1:] for ax in axes], indexing="ij")[i].ravel() for i in range(d)],
        axis=1,
    )
    vols = np.prod(cell_highs - cell_lows, axis=1)
    vmin = vmin.ravel()
    vmax = vmax.ravel()

    measure = np.zeros(len(lambdas))
    err = np.zeros(len(lambdas))
    for j, lam in enumerate(lambdas):
        inside = vmin > lam
        straddle = (~inside) & (vmax > lam)
        m = float(vols[inside].sum())
        s_lo = cell_lows[straddle]
        s_hi = cell_highs[straddle]
        for _ in range(refine):
            if len(s_lo) == 0:
                break
            m_add, s_lo, s_hi = _refine_cells(evaluate, s_lo, s_hi, lam)
            m += m_add
        resid = float(np.prod(s_hi - s_lo, axis=1).sum()) if len(s_lo) else 0.0
        measure[j] = m + 0.5 * resid
        err[j] = 0.5 * resid
    return measure, err


def _refine_cells(evaluate, lows, highs, lam, cap=200_000):
    """Split straddling cells once along every axis; returns the volume of
    subcells now fully inside plus the remaining straddlers."""
    if len(lows) > cap:  # keep memory bounded; residual goes to the error bar
        return 0.0, lows, highs
    d = lows.shape[1]
    mids = 0.5 * (lows + highs)
    new_lo = []
    new_hi = []
    for mask in range(2**d):
        lo = lows.copy()
        hi = highs.copy()
        for i in range(d):
            if (mask >> i) & 1:
                lo[:, i] = mids[:, i]
            else:
                hi[:, i] = mids[:, i]
        new_lo.append(lo)
        new_hi.append(hi)
    new_lo = np.concatenate(new_lo)
    new_hi = np.concatenate(new_hi)
    corners = []
    for mask in range(2**d):
        c = np.where(
            [[(mask >> i) & 1 for i in range(d)]],
            new_hi,
            new_lo,
        )
        corners.append(evaluate(c))
    corners = np.stack(corners)
    cmin = corners.min(axis=0)
    cmax = corners.max(axis=0)
    inside = cmin > lam
    straddle = (~inside) & (cmax > lam)
    vol_in = float(np.prod(new_hi[inside] - new_lo[inside], axis=1).sum())
    return vol_in, new_lo[straddle], new_hi[straddle]


# ---------------------------------------------------------------------------
# the public distribution-function entry point


def _as_boxes(domain) -> BoxUnion:
    if isinstance(domain, BoxUnion):
        return domain
    lows, highs = domain
    return BoxUnion([np.atleast_1d(lows)], [np.atleast_1d(highs)])


def dist_fn(
    F,
    domain,
    lambdas,
    method: str = "auto",
    budget: int = 1_000_000,
    seed: int = 0,
    resolution: int = 200,
    refine: int = 3,
) -> DistributionCurve:
    """Superlevel-set measures |{x in domain : F(x) > lambda}|.

    F may be a BoxUnion (indicator), an object exposing
    superlevel_measure_exact(lam), an object exposing evaluate(points), or a
    plain callable on (n, d) arrays.  budget is the Monte Carlo sample count
    or (via resolution) the grid size.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if method == "auto":
        if isinstance(F, BoxUnion):
            method = "exact-box"
        elif hasattr(F, "superlevel_measure_exact"):
            method = "closed-form"
        else:
            method = "monte-carlo"

    if method == "exact-box":
        if not isinstance(F, BoxUnion):
            raise TypeError("exact-box method needs an indicator BoxUnion")
        boxes = _as_boxes(domain) if domain is not None else None
        base = F.measure if boxes is None else sum(
            F.intersection_measure(lo, hi) for lo, hi in zip(boxes.lows, boxes.highs)
        )
        meas = np.where(lambdas < 1.0, base, 0.0)
        return DistributionCurve(lambdas, meas, np.zeros_like(meas), "exact-box")

    if method == "closed-form":
        meas = np.array([F.superlevel_measure_exact(l) for l in lambdas])
        return DistributionCurve(lambdas, meas, np.zeros_like(meas), "closed-form")

    evaluate = F.evaluate if hasattr(F, "evaluate") else F
    boxes = _as_boxes(domain)

    if method == "monte-carlo":
        meas, err = _mc_curve(evaluate, boxes, lambdas, budget, seed)
        curve = DistributionCurve(lambdas, meas, err, "monte-carlo")
    elif method == "grid":
        if boxes.n_boxes != 1:
            raise ValueError("grid method supports a single-box domain")
        meas, err = _grid_curve(
            evaluate, boxes.lows[0], boxes.highs[0], lambdas, resolution, refine=refine
        )
        curve = DistributionCurve(lambdas, meas, err, "grid")
    else:
        raise ValueError(f"unknown method {method!r}")

    worst = np.max(np.where(curve.measure > 0, curve.stderr / np.maximum(curve.measure, 1e-300), 0.0))
    if worst > 0.05:
        warnings.warn(
            f"budget exhausted: relative stderr {worst:.1%} exceeds 5%", BudgetWarning
        )
    return curve


# ---------------------------------------------------------------------------
# gaussian-tail level sets (band decomposition)


def _band_samples(d, k, n, seed):
    """Uniform samples of the slab k < sum z < k+1 in R_+^d: radial density
    proportional to s^{d-1}, direction uniform on the simplex."""
    rng = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 1, k]))
    u = rng.random(n)
    s = (k**d + u * ((k + 1) ** d - k**d)) ** (1.0 / d)
    e = rng.standard_exponential((n, d))
    w = e / e.sum(axis=1, keepdims=True)
    return s, w


def _band_bound(d, k, nu, gamma):
    """Per-band upper bound on the level-set volume, used to decide where to
    stop summing bands and how to allocate samples."""
    vol = ((k + 1.0) ** d - float(k) ** d) / math.factorial(d)
    lvl = (1.0 / nu) * math.exp(-float(k) ** gamma) * math.log(
        2.0 + (k + 1.0) ** d * nu * math.exp(float(k) ** gamma)
    ) ** (d - 1)
    return min(vol, lvl)


def gaussian_tail_curve(
    d: int,
    gamma: float,
    sigma: float,
    lambdas_nu,
    budget: int = 400_000,
    seed: int = 0,
    rel_tail: float = 1e-3,
) -> DistributionCurve:
    """Measures of {x in R_+^d : prod x_j^{-1} exp(-(sigma sum x_j)^gamma) > nu}
    for a whole nu sweep from one band-decomposed sample set.

    Scales to sigma = 1, splits R_+^d into slabs k < sum z < k+1, samples each
    slab with its own Philox stream, and sums band contributions until the
    analytic per-band bound certifies the remainder is below rel_tail.
    """
    if gamma <= 0 or sigma <= 0:
        raise ValueError("gamma and sigma must be positive")
    nus = np.asarray(lambdas_nu, dtype=float)
    nu_scaled = nus / sigma**d
    nu_min = float(np.min(nu_scaled))

    bounds = []
    k = 0
    while True:
        bounds.append(_band_bound(d, k, nu_min, gamma))
        if k > 4 and bounds[-1] < rel_tail * max(sum(bounds), 1e-300) / 10.0:
            break
        if k > 4000:
            break
        k += 1
    n_bands = len(bounds)
    weights = np.sqrt(np.asarray(bounds))
    weights = weights / weights.sum()
    alloc = np.maximum(200, (budget * weights).astype(int))

    meas = np.zeros(len(nus))
    var = np.zeros(len(nus))
    for k in range(n_bands):
        s, w = _band_samples(d, k, alloc[k], seed)
        logF = -np.sum(np.log(s[:, None] * w), axis=1) - s**gamma
        vol = ((k + 1.0) ** d - float(k) ** d) / math.factorial(d)
        p = np.mean(logF[:, None] > np.log(nu_scaled)[None, :], axis=0)
        meas += vol * p
        var += vol**2 * p * (1.0 - p) / alloc[k]
    tail = bounds[-1] * 2.0
    return DistributionCurve(
        nus, meas / sigma**d, (np.sqrt(var) + tail) / sigma**d, "monte-carlo"
    )


def gaussian_tail_levelset(
    d: int, gamma: float, sigma: float, nu: float, budget: int = 400_000, seed: int = 0
):
    """Single-level version of gaussian_tail_curve; returns (measure, stderr)."""
    curve = gaussian_tail_curve(d, gamma, sigma, [nu], budget=budget, seed=seed)
    return float(curve.measure[0]), float(curve.stderr[0])


def simplex_band_curve(
    field,
    d: int,
    lambdas,
    s_lo: float = 1e-9,
    s_hi_start: float = 8.0,
    budget: int = 400_000,
    seed: int = 0,
    band_ratio: float = 1.4,
    rel_tail: float = 1e-3,
) -> DistributionCurve:
    """Level-set measures on R_+^d for fields that depend on x only through
    (prod x_j, sum x_j), exposed as field.log_from_sum_prod(log_prod, s).

    Geometric bands in s = sum x_j, radial density s^{d-1} within a band and
    Dirichlet directions; bands extend upward until three consecutive bands
    contribute less than rel_tail of the running total at every level.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    log_lams = np.log(lambdas)
    edges = [s_lo]
    while edges[-1] < s_hi_start:
        edges.append(edges[-1] * band_ratio)
    meas = np.zeros(len(lambdas))
    var = np.zeros(len(lambdas))
    k = 0
    quiet = 0
    while True:
        if k >= len(edges) - 1:
            edges.append(edges[-1] * band_ratio)
        a, b = edges[k], edges[k + 1]
        n = max(400, budget // 256)
        rng = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 2, k]))
        u = rng.random(n)
        s = (a**d + u * (b**d - a**d)) ** (1.0 / d)
        e = rng.standard_exponential((n, d))
        w = e / e.sum(axis=1, keepdims=True)
        log_prod = np.log(s[:, None] * w).sum(axis=1)
        logF = field.log_from_sum_prod(log_prod, s)
        vol = (b**d - a**d) / math.factorial(d)
        p = np.mean(logF[:, None] > log_lams[None, :], axis=0)
        meas += vol * p
        var += vol**2 * p * (1.0 - p) / n
        band_contrib = vol * p.max()
        total = meas.max()
        if b > s_hi_start and (band_contrib < rel_tail * max(total, 1e-300)):
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
        k += 1
        if k > 600:
            warnings.warn("simplex band sweep hit the band cap", BudgetWarning)
            break
    return DistributionCurve(lambdas, meas, np.sqrt(var), "monte-carlo")


# ---------------------------------------------------------------------------
# rearrangement and quasinorms


def rearrange(curve: DistributionCurve, s_grid=None) -> RearrangementCurve:
    """Decreasing rearrangement as the generalized inverse of the
    distribution curve: f*(s) = inf{lambda : m(lambda) <= s}.

    Right-continuous and nonincreasing.  Below the resolved measure range
    f* is clamped to the largest sampled lambda; past the measure at the
    smallest lambda it is set to 0 (the sweep is expected to cover the
    support).
    """
    s = np.asarray(s_grid, dtype=float) if s_grid is not None else default_s_grid()
    lam = curve.lam
    m = curve.measure
    n = len(m)
    # m is nonincreasing in lam: {j : m[j] <= s} is a suffix of length L
    L = np.searchsorted(m[::-1], s, side="right")
    jstar = np.clip(n - L, 0, n - 1)
    fstar = lam[jstar]
    fstar = np.where(L == 0, lam[-1], fstar)  # unresolved head
    fstar = np.where(L == n, 0.0, fstar)  # past the support measure
    return RearrangementCurve(s=s, fstar=fstar, method=curve.method)


def _cell_contributions(r: RearrangementCurve, p: float, weight=None):
    s = r.s
    f = r.fstar
    ds = p * (s[1:] ** (1.0 / p) - s[:-1] ** (1.0 / p))
    fmid = 0.5 * (f[1:] + f[:-1])
    if weight is not None:
        smid = np.sqrt(s[1:] * s[:-1])
        fmid = fmid * weight(smid)
    return fmid * ds


def _check_head_tail(contribs, total, head_s, head_f, p, what):
    if total <= 0:
        return
    head = head_f * p * head_s ** (1.0 / p)
    n = len(contribs)
    edge = contribs[: max(4, n // 50)].sum()
    if head > 0.05 * total or edge > 0.25 * total:
        raise NormDivergenceError(
            f"{what}: head of the rearrangement integral has not stabilized "
            f"(unresolved head ~{head:.3g} vs total {total:.3g})"
        )
    tail = contribs[-max(4, n // 50) :].sum()
    if tail > 0.25 * total:
        raise NormDivergenceError(f"{what}: tail of the integral has not stabilized")


def lorentz_p1_norm(p: float, r: RearrangementCurve) -> float:
    """Lorentz (p, 1) norm: integral of f*(s) s^{1/p} ds/s."""
    if p <= 1.0:
        raise ValueError("the Lorentz (p,1) functional here expects p > 1")
    contribs = _cell_contributions(r, p)
    total = float(contribs.sum())
    _check_head_tail(contribs, total, r.s[0], r.fstar[0], p, "lorentz_p1_norm")
    return total


def lorentz_zygmund_norm(p0: float, npow: float, r: RearrangementCurve) -> float:
    """Lorentz-Zygmund norm: integral of f*(s) s^{1/p0} log^{npow}(2 + 1/s) ds/s.

    npow is the full exponent of the logarithm (0 recovers lorentz_p1_norm).
    """
    if npow < 0:
        raise ValueError("log exponent must be nonnegative")
    w = (lambda s: np.log(2.0 + 1.0 / s) ** npow) if npow > 0 else None
    contribs = _cell_contributions(r, p0, weight=w)
    total = float(contribs.sum())
    head_f = r.fstar[0] * (math.log(2.0 + 1.0 / r.s[0]) ** npow)
    _check_head_tail(contribs, total, r.s[0], head_f, p0, "lorentz_zygmund_norm")
    return total


def weak_orlicz_quasinorm(p1: float, npow: float, curve: DistributionCurve) -> float:
    """Weak-Orlicz quasinorm: the infimum over eta > 0 such that
    sup_lambda (lambda) log^{-npow}(2 + lambda) |{|f|/eta > lambda}|^{1/p1} <= 1,
    computed by bisection on eta.

    npow = 0 collapses to the weak-L^{p1} quasinorm.
    """
    lam = curve.lam
    m = curve.measure
    live = m > 0
    if not np.any(live):
        return 0.0

    def sup_stat(eta):
        x = lam[live] / eta
        g = x * np.log(2.0 + x) ** (-npow) * m[live] ** (1.0 / p1)
        return float(np.max(g)), int(np.argmax(g))

    lo, hi = 1e-12, 1e12
    v, _ = sup_stat(hi)
    while v > 1.0 and hi < 1e290:
        hi *= 1e3
        v, _ = sup_stat(hi)
    v, _ = sup_stat(lo)
    while v < 1.0 and lo > 1e-290:
        lo *= 1e-3
        v, _ = sup_stat(lo)
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        v, _ = sup_stat(mid)
        if v > 1.0:
            lo = mid
        else:
            hi = mid
    eta = math.sqrt(lo * hi)
    _, k = sup_stat(eta)
    idx_live = np.nonzero(live)[0]
    if idx_live[k] in (0, len(lam) - 1):
        warnings.warn(
            "weak-Orlicz sup attained at the lambda boundary; extend the sweep",
            BudgetWarning,
        )
    return eta


# ---------------------------------------------------------------------------
# one-dimensional helpers for separable inputs


def dist_curve_1d(fn, lo: float, hi: float, lambdas, n_grid: int = 4096) -> DistributionCurve:
    """Deterministic 1-D distribution curve: dense evaluation plus bisection
    of every level crossing."""
    lambdas = np.asarray(lambdas, dtype=float)
    if lo <= 0:
        xs = np.concatenate([[max(lo, 1e-300)], np.geomspace(max(hi * 1e-14, 1e-16), hi, n_grid - 1)])
    else:
        xs = np.geomspace(lo, hi, n_grid)
    vals = np.asarray(fn(xs), dtype=float)
    meas = np.empty(len(lambdas))
    for j, lam in enumerate(lambdas):
        above = vals > lam
        total = 0.0
        # interior runs of 'above', with bisection at each boundary
        changes = np.nonzero(np.diff(above.astype(int)))[0]
        edges = []
        for c in changes:
            a, b = xs[c], xs[c + 1]
            fa = above[c]
            for _ in range(50):
                m = 0.5 * (a + b)
                if (fn(np.array([m]))[0] > lam) == fa:
                    a = m
                else:
                    b = m
            edges.append(0.5 * (a + b))
        bounds = [xs[0]] + edges + [xs[-1]]
        state = above[0]
        for aa, bb in zip(bounds, bounds[1:]):
            if state:
                total += bb - aa
            state = not state
        meas[j] = total
    return DistributionCurve(lambdas, meas, np.zeros_like(meas), "grid")


def field_curve_1d(xs, values, lambdas) -> DistributionCurve:
    """Superlevel measures |{x : F(x) > lambda}| of a field sampled on an
    increasing grid, with log-linear interpolation of the crossings."""
    xs = np.asarray(xs, dtype=float)
    v = np.asarray(values, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    with np.errstate(divide="ignore"):
        lv = np.log(np.maximum(v, 1e-300))
        lx = np.log(xs)
    meas = np.empty(len(lambdas))
    for j, lam in enumerate(lambdas):
        ll = math.log(lam)
        above = lv > ll
        total = float(np.sum(np.where(above[:-1] & above[1:], np.diff(xs), 0.0)))
        cross = above[:-1] != above[1:]
        for i in np.nonzero(cross)[0]:
            frac = (ll - lv[i]) / (lv[i + 1] - lv[i])
            xc = math.exp(lx[i] + frac * (lx[i + 1] - lx[i]))
            total += (xc - xs[i]) if above[i] else (xs[i + 1] - xc)
        meas[j] = total
    return DistributionCurve(lambdas, meas, np.zeros_like(meas), "grid")


def lorentz_norm_separable_1d(f: SeparableFunction, p: float, per_decade: int = 64) -> float:
    """Lorentz (p,1) norm of a nonnegative 1-D separable function.

    Exact for a single box term; otherwise builds the distribution curve on a
    dense grid and integrates the rearrangement.
    """
    f = f.absolute()
    if f.d != 1:
        raise ValueError("needs a one-dimensional function")
    if len(f.terms) == 1 and isinstance(f.terms[0][1][0], Box):
        c, (b,) = f.terms[0]
        return c * p * (b.hi - b.lo) ** (1.0 / p)
    lo, hi = f.support_box()
    lo, hi = float(lo[0]), float(hi[0])
    from .functions import PowerExp

    hi_eff = hi
    if math.isinf(hi):
        hi_eff = max(
            piece.effective_hi()
            for _, (piece,) in f.terms
            if isinstance(piece, PowerExp)
        )
    x_lo = max(lo, 1e-12)
    probe = np.geomspace(x_lo, hi_eff, 4097)
    vmax = float(np.max(f.evaluate(probe[:, None])))
    lam_hi = vmax * 1.001
    lam_lo = max(vmax * 1e-14, 1e-280)
    lambdas = np.geomspace(lam_lo, lam_hi, 80 * 6)
    curve = dist_curve_1d(lambda x: f.evaluate(x[:, None]), x_lo, hi_eff, lambdas)
    r = rearrange(curve, default_s_grid(1e-12, max(hi_eff * 2, 10.0), per_decade))
    return lorentz_p1_norm(p, r)
