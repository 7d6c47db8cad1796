"""Generators for the named functions and sets of the sharpness arguments:
the homogeneous comparison weight psi_d, the damped product profile F_sigma,
the unit-cube sharpness input, the small-box family f_t, the slab family
f_R / E_R, the constrained sets E_t(beta) and their dyadic union F_N, and
the divergence witness at the lower endpoint.

Every generator re-verifies its normalization (Lorentz norm ~ 1, measure
laws) before handing the family out; a violation aborts with a diagnostic.
Sets with coupled coordinate constraints are realized as box unions (slab or
dyadic decompositions) so the operator engine stays separable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .functions import BoxUnion, SeparableFunction
from .kernel import TypeMultiIndex, log_h1d
from .measure import (
    DistributionCurve,
    product_levelset_exact,
    unit_cube_product_sublevel,
    unit_cube_product_sublevel_inverse,
)

__all__ = [
    "SplitSpec",
    "CounterexampleFamily",
    "NormalizationError",
    "psi_d",
    "f_sigma",
    "PsiField",
    "FSigmaField",
    "ProductPowerField",
    "TabulatedMaximalProductField",
    "sharpness_cube",
    "family_f_t",
    "family_E_R",
    "family_E_t_beta",
    "family_F_N",
    "divergence_witness_p0",
    "WitnessReport",
]


class NormalizationError(RuntimeError):
    """A family generator failed its stated normalization check."""


@dataclass(frozen=True)
class SplitSpec:
    """Partition of {1..d} into primed (singular) and double-primed
    coordinates; the counterexample regimes require 2 <= d' <= d''."""

    d: int
    d_prime: int

    def __post_init__(self):
        if not (1 <= self.d_prime < self.d):
            raise ValueError("need 1 <= d' < d")

    @property
    def d_dprime(self) -> int:
        return self.d - self.d_prime

    @property
    def admissible_counterexample(self) -> bool:
        return 2 <= self.d_prime <= self.d_dprime


@dataclass
class CounterexampleFamily:
    kind: str
    params: dict
    function: SeparableFunction | None = None
    set_realization: BoxUnion | None = None
    predicted_field: object | None = None
    window: tuple | None = None  # (lows, highs) of the probe window
    normalization: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# analytic probe fields


def psi_d(d: int, p1: float, x):
    """(sum x_j)^{(2/p1 - 1) d} * prod x_j^{-1/p1}."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    s = x.sum(axis=1)
    lp = np.log(x).sum(axis=1)
    out = np.exp((2.0 / p1 - 1.0) * d * np.log(s) - lp / p1)
    return float(out[0]) if out.shape == (1,) else out


def f_sigma(d: int, p1: float, gamma: float, sigma: float, x):
    """prod x_j^{-1/p1} * exp(-(sigma sum x_j)^gamma)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    s = x.sum(axis=1)
    lp = np.log(x).sum(axis=1)
    out = np.exp(-lp / p1 - (sigma * s) ** gamma)
    return float(out[0]) if out.shape == (1,) else out


class PsiField:
    """psi_d as an evaluable field; depends on x only through (sum, prod)."""

    def __init__(self, d: int, p1: float):
        self.d, self.p1 = d, p1

    def evaluate(self, x):
        with np.errstate(divide="ignore", over="ignore"):
            return psi_d(self.d, self.p1, x)

    def log_from_sum_prod(self, log_prod, s):
        return (2.0 / self.p1 - 1.0) * self.d * np.log(s) - log_prod / self.p1


class FSigmaField:
    def __init__(self, d: int, p1: float, gamma: float, sigma: float):
        self.d, self.p1, self.gamma, self.sigma = d, p1, gamma, sigma

    def evaluate(self, x):
        with np.errstate(divide="ignore", over="ignore"):
            return f_sigma(self.d, self.p1, self.gamma, self.sigma, x)

    def log_from_sum_prod(self, log_prod, s):
        return -log_prod / self.p1 - (self.sigma * s) ** self.gamma


class ProductPowerField:
    """coeff * prod x_j^{-beta} on the cube (0, t)^d, with exact superlevel
    measures from the product level-set formula."""

    def __init__(self, d: int, t: float, beta: float, coeff: float = 1.0):
        if beta <= 0 or coeff <= 0:
            raise ValueError("need positive decay exponent and coefficient")
        self.d, self.t, self.beta, self.coeff = d, t, beta, coeff

    def evaluate(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        inside = np.all((x > 0) & (x < self.t), axis=1)
        with np.errstate(divide="ignore", over="ignore"):
            v = self.coeff * np.exp(-self.beta * np.log(x).sum(axis=1))
        return np.where(inside, v, 0.0)

    def superlevel_measure_exact(self, lam: float) -> float:
        if lam <= 0:
            return self.t**self.d
        nu = (lam / self.coeff) ** (1.0 / self.beta)
        return product_levelset_exact(self.d, self.t, nu)

    def rearrangement_exact(self, s):
        """f*(s) by inverting the closed sublevel form."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty_like(s)
        vol = self.t**self.d
        for i, si in enumerate(s):
            if si >= vol:
                out[i] = 0.0
                continue
            u = unit_cube_product_sublevel_inverse(self.d, si / vol)
            out[i] = self.coeff * (u * vol) ** (-self.beta)
        return out


# ---------------------------------------------------------------------------
# tabulated maximal field for box inputs (the sharpness-cube machinery)


class TabulatedMaximalProductField:
    """sup over a time grid of the kernel integral against a box input,
    tabulated per axis on a log grid in x and interpolated.

    Valid for single-box indicator inputs: the kernel integral factorizes as
    a product of per-axis profiles sharing the time variable.  Used where the
    field must be evaluated at millions of points (level-set measures).
    """

    def __init__(
        self,
        alpha,
        lows,
        highs,
        coeff: float = 1.0,
        t_grid=None,
        x_min: float = 1e-21,
        x_max: float = 50.0,
        points_per_decade: int = 40,
        gl_order: int = 60,
    ):
        self.alpha = alpha if isinstance(alpha, TypeMultiIndex) else TypeMultiIndex(alpha)
        self.lows = np.atleast_1d(np.asarray(lows, dtype=float))
        self.highs = np.atleast_1d(np.asarray(highs, dtype=float))
        self.coeff = float(coeff)
        d = self.alpha.d
        if len(self.lows) != d:
            raise ValueError("box dimension mismatch")
        self.ts = np.asarray(t_grid if t_grid is not None else np.geomspace(1e-4, 1e2, 6 * 24 + 1))
        n = int(points_per_decade * math.log10(x_max / x_min)) + 1
        self.xg = np.geomspace(x_min, x_max, n)
        self.log_xg = np.log(self.xg)
        gx, gw = np.polynomial.legendre.leggauss(gl_order)
        self.log_phi = []
        for j in range(d):
            lo, hi = self.lows[j], self.highs[j]
            if lo > 0:
                eta = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gx
                w = 0.5 * (hi - lo) * gw
            else:
                # eta = u^2 substitution tames the eta^{a/2} endpoint
                su = math.sqrt(hi)
                u = 0.5 * su + 0.5 * su * gx
                eta = u * u
                w = su * gw * u  # du * 2u / 2 ... 0.5*su*gw * 2u
            tab = np.zeros((len(self.ts), n))
            for i, t in enumerate(self.ts):
                lv = log_h1d(self.alpha.alpha[j], t, self.xg[:, None], eta[None, :])
                tab[i] = np.exp(np.minimum(lv, 700.0)) @ w
            self.log_phi.append(np.log(np.maximum(tab, 1e-300)))

    def _axis_log(self, j, x):
        """log phi_t(x) for all tabulated t, by log-log linear interpolation."""
        lx = np.log(np.maximum(x, self.xg[0]))
        lx = np.minimum(lx, self.log_xg[-1])
        idx = np.clip(np.searchsorted(self.log_xg, lx) - 1, 0, len(self.xg) - 2)
        w = (lx - self.log_xg[idx]) / (self.log_xg[idx + 1] - self.log_xg[idx])
        tab = self.log_phi[j]
        return tab[:, idx] * (1.0 - w) + tab[:, idx + 1] * w  # (nt, npts)

    def log_evaluate(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        acc = self._axis_log(0, x[:, 0])
        for j in range(1, self.alpha.d):
            acc = acc + self._axis_log(j, x[:, j])
        return math.log(self.coeff) + acc.max(axis=0)

    def evaluate(self, x):
        return np.exp(np.minimum(self.log_evaluate(x), 700.0))

    def corner_constant(self, probe=1e-12):
        """Fitted constant in field ~ C prod x_j^{-1/p1} deep in the corner
        (minimal-coordinate axes only make sense when all alphas are equal)."""
        pt = np.full((1, self.alpha.d), probe)
        p1 = -2.0 / self.alpha.tilde_alpha
        return float(
            np.exp(self.log_evaluate(pt)[0] + (1.0 / p1) * self.alpha.d * math.log(probe))
        )


# ---------------------------------------------------------------------------
# sharpness cube


def sharpness_cube(d: int, alpha) -> CounterexampleFamily:
    """Indicator of the cube (1/2, 1)^d plus the predicted corner field
    prod x_j^{-1/p1} (minimal coordinates) on (0, 1)^d."""
    alpha = alpha if isinstance(alpha, TypeMultiIndex) else TypeMultiIndex(alpha)
    if alpha.d != d:
        raise ValueError("alpha dimension mismatch")
    if not alpha.tilde_alpha < 0:
        raise ValueError("the sharpness cube needs a negative minimal type")
    p1 = -2.0 / alpha.tilde_alpha
    cube = SeparableFunction.cube(d, 0.5, 1.0)
    predicted = ProductPowerField(d, t=1.0, beta=1.0 / p1, coeff=1.0)
    return CounterexampleFamily(
        kind="sharpness-cube",
        params={"d": d, "alpha": alpha.alpha, "p1": p1},
        function=cube,
        predicted_field=predicted,
        window=(np.zeros(d), np.ones(d)),
    )


# ---------------------------------------------------------------------------
# f_t family (2 <= d' < d'')


def family_f_t(d: int, split: SplitSpec, p1: float, t: float) -> CounterexampleFamily:
    """Normalized indicator of the box (t,2t)^{d'} x (1/t,2/t)^{d''} and its
    predicted lower field t^{d''/p1} prod' x_j^{-1/p1} on the probe window."""
    if split.d != d or not (2 <= split.d_prime < split.d_dprime):
        raise ValueError("f_t family needs 2 <= d' < d''")
    if not 0 < t <= 0.25:
        raise ValueError("t must be in (0, 1/4] (the unit lower bound needs it)")
    dp, dpp = split.d_prime, split.d_dprime
    lows = np.array([t] * dp + [1.0 / t] * dpp)
    highs = np.array([2.0 * t] * dp + [2.0 / t] * dpp)
    coeff = t ** ((dpp - dp) / p1)
    f = SeparableFunction.indicator_box(lows, highs, coeff)
    measure = t ** (dp - dpp)
    lorentz = coeff * p1 * measure ** (1.0 / p1)  # = p1 for this family
    if not 0.5 * p1 <= lorentz <= 2.0 * p1:
        raise NormalizationError(
            f"f_t Lorentz normalization broke: got {lorentz:g}, expected ~{p1:g}"
        )
    window = (
        np.array([0.0] * dp + [1.0 / t] * dpp),
        np.array([t] * dp + [2.0 / t] * dpp),
    )
    predicted = _FtLowerField(dp, dpp, p1, t)
    return CounterexampleFamily(
        kind="f_t-box",
        params={"d": d, "d_prime": dp, "t": t, "p1": p1},
        function=f,
        predicted_field=predicted,
        window=window,
        normalization={"lorentz_p1_1": lorentz, "measure": measure},
    )


class _FtLowerField:
    """t^{d''/p1} prod' x_j^{-1/p1} on the f_t probe window, with exact
    superlevel measures over the window."""

    def __init__(self, dp, dpp, p1, t):
        self.dp, self.dpp, self.p1, self.t = dp, dpp, p1, t

    def evaluate(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        lp = np.log(x[:, : self.dp]).sum(axis=1)
        return np.exp((self.dpp / self.p1) * math.log(self.t) - lp / self.p1)

    def superlevel_measure_exact(self, lam: float) -> float:
        # primed part via the product level-set formula; double-primed window
        # has volume t^{-d''}
        nu = (lam * self.t ** (-self.dpp / self.p1)) ** self.p1
        primed = product_levelset_exact(self.dp, self.t, nu)
        return primed * self.t ** (-self.dpp)


# ---------------------------------------------------------------------------
# E_R family (d even, d' = d'' = d/2)


def family_E_R(d: int, split: SplitSpec, p1: float, R: float, slices: int | None = None) -> CounterexampleFamily:
    """Slab union approximating the set {1 < y_d < R, y_d^{-1}/4 < y_j < 2/y_d
    (j <= d'), y_d/8 < y_j < 8 y_d (d' < j < d)} and the normalized indicator.

    The slab boxes are inner approximations on logarithmic slices in y_d, so
    the realized measure sits within a fixed factor of the exact integral;
    the slice count scales with log R to keep the per-slice loss uniform.
    """
    if split.d != d or split.d_prime != split.d_dprime or d % 2 or d < 4:
        raise ValueError("E_R family needs even d >= 4 with d' = d'' = d/2")
    if R <= 6:
        raise ValueError("R must exceed 6")
    if slices is None:
        slices = max(16, int(math.ceil(32.0 * math.log10(R))))
    if slices < 8:
        raise ValueError("need at least 8 slices")
    dp = split.d_prime
    edges = np.geomspace(1.0, R, slices + 1)
    lows, highs = [], []
    for u0, u1 in zip(edges[:-1], edges[1:]):
        # inner box valid for every y_d in the slice (slice ratio < 8 required)
        lo_p, hi_p = 1.0 / (4.0 * u0), 2.0 / u1
        lo_m, hi_m = u1 / 8.0, 8.0 * u0
        if hi_p <= lo_p or hi_m <= lo_m:
            raise ValueError("slices too coarse for an inner box")
        lows.append([lo_p] * dp + [lo_m] * (dp - 1) + [u0])
        highs.append([hi_p] * dp + [hi_m] * (dp - 1) + [u1])
    boxes = BoxUnion(lows, highs)
    # exact measure of the continuous set: c0 * log R with c0 = 1.75^{d'} 7.875^{d'-1}
    c0 = 1.75**dp * 7.875 ** (dp - 1)
    exact = c0 * math.log(R)
    realized = boxes.measure
    if not 0.5 <= realized / exact <= 2.0:
        raise NormalizationError(
            f"E_R slab realization measures {realized:g}, exact set {exact:g}"
        )
    coeff = realized ** (-1.0 / p1)
    f = boxes.as_indicator()
    f = SeparableFunction([(coeff * c, ps) for c, ps in f.terms])
    predicted = _ERLowerField(dp, p1, R)
    window = (
        np.array([0.0] * dp + [2.0] * (dp - 1) + [4.0]),
        np.array([0.25] * dp + [2.0 * (R - 1.0)] * (dp - 1) + [R - 1.0]),
    )
    return CounterexampleFamily(
        kind="E_R-slab",
        params={"d": d, "d_prime": dp, "R": R, "p1": p1, "slices": slices},
        function=f,
        set_realization=boxes,
        predicted_field=predicted,
        window=window,
        normalization={
            "measure_boxes": realized,
            "measure_exact": exact,
            "log_R": math.log(R),
            "measure_over_logR": realized / math.log(R),
        },
    )


class _ERLowerField:
    """(log R)^{-1/p1} x_d^{-d'/p1} prod' x_j^{-1/p1} on the E_R window, with
    the exact superlevel measure over the window (the inner product level set
    is x_d-independent after scaling, leaving a log integral in x_d)."""

    def __init__(self, dp, p1, R):
        self.dp, self.p1, self.R = dp, p1, R

    def evaluate(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        lp = np.log(x[:, : self.dp]).sum(axis=1)
        xd = x[:, -1]
        return np.exp(
            -math.log(math.log(self.R)) / self.p1
            - (self.dp / self.p1) * np.log(xd)
            - lp / self.p1
        )

    def superlevel_measure_exact(self, lam: float) -> float:
        # window: x' in (0, 1/x_d)^{d'}, middle coords in (x_d/2, 2 x_d),
        # 4 < x_d < R - 1; the primed level set has t^{d'} nu = lam^p1 log R
        nu_inner = lam**self.p1 * math.log(self.R)
        u = min(1.0, 1.0 / nu_inner)
        g = float(unit_cube_product_sublevel(self.dp, u))
        if self.R <= 5.0:
            return 0.0
        # integral over x_d of (3 x_d / 2)^{d'-1} x_d^{-d'} dx_d = 1.5^{d'-1} log((R-1)/4)
        return 1.5 ** (self.dp - 1) * math.log((self.R - 1.0) / 4.0) * g


# ---------------------------------------------------------------------------
# E_t(beta) and F_N (d' = d'')


def _dyadic_product_boxes(dp: int, t: float, prod_cap: float, depth: int):
    """Inner dyadic realization of {y' in (0,t)^{d'} : prod y_j < prod_cap}
    as geometric boxes: split (0,t)^{d'} into dyadic log cells down to
    2^{-depth} and keep cells whose max corner product is below the cap."""
    if depth < 2:
        raise ValueError("dyadic depth must be >= 2")
    # cells indexed by k in {0..depth-1}^{d'}: y_j in (t 2^{-k-1}, t 2^{-k}],
    # plus the core y_j <= t 2^{-depth} handled as one box when admissible
    lows, highs = [], []
    ks = np.stack(np.meshgrid(*[np.arange(depth)] * dp, indexing="ij"), axis=-1).reshape(-1, dp)
    hi_prod = t**dp * np.exp2(-ks.sum(axis=1).astype(float))
    keep = hi_prod < prod_cap
    for k in ks[keep]:
        lows.append(t * np.exp2(-(k + 1.0)))
        highs.append(t * np.exp2(-k.astype(float)))
    return lows, highs


def family_E_t_beta(
    d: int, split: SplitSpec, p1: float, t: float, beta: float, depth: int = 12
) -> CounterexampleFamily:
    """Dyadic box realization of {prod' y_j^{-1/p1} > beta, y_j < t (j <= d'),
    1/t < y_j < 2/t (j > d')} plus the predicted lower value."""
    if split.d != d or split.d_prime < 2:
        raise ValueError("need d' >= 2")
    if not 0 < t <= 0.25:
        raise ValueError("t must be in (0, 1/4]")
    dp, dpp = split.d_prime, split.d_dprime
    if t**dp * beta**p1 <= 1.0:
        raise ValueError("inadmissible parameters: need t^{d'} beta^{p1} > 1")
    prod_cap = beta**-p1
    lows_p, highs_p = _dyadic_product_boxes(dp, t, prod_cap, depth)
    if not lows_p:
        raise NormalizationError("dyadic realization came out empty; raise depth")
    lo_pp = [1.0 / t] * dpp
    hi_pp = [2.0 / t] * dpp
    lows = [np.concatenate([lp, lo_pp]) for lp in lows_p]
    highs = [np.concatenate([hp, hi_pp]) for hp in highs_p]
    boxes = BoxUnion(lows, highs)
    exact = product_levelset_exact(dp, t, beta**p1) * t**-dpp
    target = beta**-p1 * math.log(2.0 + t**dp * beta**p1) ** (dp - 1) * t**-dpp
    realized = boxes.measure
    if not 0.35 <= realized / target <= 2.0:
        raise NormalizationError(
            f"E_t(beta) measure {realized:g} is far from the predicted law {target:g}"
        )
    # t^{d'' - d'/p0} beta |E_t| with 1/p0 = 1 - 1/p1
    predicted_value = t ** (dpp - dp * (1.0 - 1.0 / p1)) * beta * exact
    return CounterexampleFamily(
        kind="E_t-beta",
        params={"d": d, "d_prime": dp, "t": t, "beta": beta, "depth": depth, "p1": p1},
        function=boxes.as_indicator(),
        set_realization=boxes,
        window=(
            np.array([0.0] * dp + [1.0 / t] * dpp),
            np.array([t] * dp + [2.0 / t] * dpp),
        ),
        normalization={
            "measure_boxes": realized,
            "measure_exact": exact,
            "measure_law": target,
            "predicted_lower_value": predicted_value,
        },
    )


def family_F_N(d: int, split: SplitSpec, p1: float, N: int, depth: int = 12) -> CounterexampleFamily:
    """Disjoint union over j = 2..N of E_{2^{-j}}(beta_j) with
    beta_j = N^{1/p1} t_j^{-d'/p1}; the double-primed windows (2^j, 2^{j+1})
    are pairwise disjoint, so the slab measures add exactly."""
    if N < 4:
        raise ValueError("N must be >= 4")
    dp, dpp = split.d_prime, split.d_dprime
    members = []
    for j in range(2, N + 1):
        t = 2.0**-j
        beta = N ** (1.0 / p1) * t ** (-dp / p1)
        members.append(family_E_t_beta(d, split, p1, t, beta, depth))
    total = sum(m.set_realization.measure for m in members)
    total_exact = sum(m.normalization["measure_exact"] for m in members)
    law = math.log(2.0 + N) ** (dp - 1)
    blocks = []
    for j, m in zip(range(2, N + 1), members):
        t = 2.0**-j
        # probe block (2^{-j-1},2^{-j})^{d'} x (2^j,2^{j+1})^{d''}
        vol = (0.5 * t) ** dp * (1.0 / t) ** dpp
        blocks.append(
            {
                "j": j,
                "t": t,
                "block_volume": vol,
                "predicted_lower_value": m.normalization["predicted_lower_value"],
                "member_measure": m.set_realization.measure,
                "member_measure_exact": m.normalization["measure_exact"],
            }
        )
    return CounterexampleFamily(
        kind="F_N-union",
        params={"d": d, "d_prime": dp, "N": N, "p1": p1, "depth": depth},
        normalization={
            "measure_total": total,
            "measure_total_exact": total_exact,
            "measure_law": law,
            "blocks": blocks,
            "member_sum_check": abs(total - sum(b["member_measure"] for b in blocks)),
        },
    )


# ---------------------------------------------------------------------------
# divergence witness at the lower endpoint


@dataclass
class WitnessReport:
    epsilons: list
    pairings: list
    growth_factors: list
    cross_check_rel: list
    probe: str
    psi_star_constant: float


def _cube_cross_section(s, A: float, d: int):
    """(d-1)-volume of {u in (0,A)^d : sum u = s} (Irwin-Hall shape)."""
    s = np.asarray(s, dtype=float)
    x = s / A
    out = np.zeros_like(x)
    for k in range(d):
        sign = (-1.0) ** k
        out += sign * math.comb(d, k) * np.clip(x - k, 0.0, None) ** (d - 1)
    return out * A ** (d - 1) / math.factorial(d - 1)


def divergence_witness_p0(
    d: int,
    alpha,
    epsilons=(1e-2, 1e-4, 1e-6),
    log_exponent: float | None = None,
    quad_points: int = 4000,
) -> WitnessReport:
    """Truncated pairing of the rearranged canonical probe against the corner
    weight prod y_j^{-1/p1} over (eps, 1)^d.

    The probe has rearrangement g*(s) = s^{-1/p0} log^{-1-(td-1)/p1}(2 + 1/s)
    (borderline divergent lower-endpoint integral); it is placed to achieve
    equality in the Hardy-Littlewood pairing inequality, which reduces the
    truncated pairing to a one-dimensional integral over s = sum log(1/y_j).
    A direct d-dimensional quadrature cross-checks each truncation.
    """
    alpha = alpha if isinstance(alpha, TypeMultiIndex) else TypeMultiIndex(alpha)
    if alpha.d != d or not alpha.tilde_alpha < 0:
        raise ValueError("need a d-dimensional alpha with negative minimum")
    p1 = -2.0 / alpha.tilde_alpha
    p0 = 2.0 / (2.0 + alpha.tilde_alpha)
    td = alpha.tilde_d()
    if log_exponent is None:
        log_exponent = -1.0 - (td - 1.0) / p1

    def pairing_exact(eps: float) -> float:
        # y in (eps,1)^d, s = sum log(1/y_j): dy = e^{-s} N_A(s) ds with the
        # cube cross-section N_A; Psi = e^{s/p1}; the placement composes g*
        # with the exact superlevel measure G_d(e^{-s}), and the powers of
        # e^s cancel through 1/p0 + 1/p1 = 1
        A = math.log(1.0 / eps)
        s = np.linspace(0.0, d * A, quad_points)[1:]
        surv = _survival(s, d)
        n_cross = _cube_cross_section(s, A, d)
        logw = np.log(2.0 + np.exp(np.minimum(s, 700.0)) / surv)
        integrand = n_cross * surv ** (-1.0 / p0) * logw**log_exponent
        return float(np.trapezoid(integrand, s))

    def pairing_direct(eps: float) -> float:
        # direct tensor quadrature (d <= 3 sane); checks the HL-equality
        # reduction at the stated truncation
        n = 160
        g = np.geomspace(eps, 1.0, n + 1)
        mids = np.sqrt(g[:-1] * g[1:])
        wids = np.diff(g)
        grids = np.meshgrid(*([mids] * d), indexing="ij")
        wgrid = np.meshgrid(*([wids] * d), indexing="ij")
        y = np.stack([gg.ravel() for gg in grids], axis=1)
        w = np.prod(np.stack([ww.ravel() for ww in wgrid], axis=1), axis=1)
        s = np.log(1.0 / y).sum(axis=1)
        sigma = np.exp(-s) * _survival(s, d)  # superlevel measure of Psi at Psi(y)
        gstar = sigma ** (-1.0 / p0) * np.log(2.0 + 1.0 / sigma) ** log_exponent
        psi = np.exp(s / p1)
        return float(np.sum(gstar * psi * w))

    pairings = [pairing_exact(e) for e in epsilons]
    checks = [
        abs(pairing_direct(e) / pairing_exact(e) - 1.0) for e in epsilons
    ]
    growth = [pairings[i + 1] / pairings[i] for i in range(len(pairings) - 1)]
    if any(g < 1.02 for g in growth):
        warnings.warn(
            "witness pairing growth has stalled; the probe does not diverge",
            UserWarning,
        )

    # rearranged corner weight bound: Psi*(s) >= c s^{-1/p1} log^{(d-1)/p1}(2+1/s)
    psi = ProductPowerField(d, 1.0, 1.0 / p1)
    ss = np.geomspace(1e-8, 0.5, 60)
    ratios = psi.rearrangement_exact(ss) / (
        ss ** (-1.0 / p1) * np.log(2.0 + 1.0 / ss) ** ((d - 1.0) / p1)
    )
    return WitnessReport(
        epsilons=list(epsilons),
        pairings=pairings,
        growth_factors=growth,
        cross_check_rel=checks,
        probe=f"g*(s) = s^(-1/p0) * log^({log_exponent:g})(2+1/s), p0={p0:g}",
        psi_star_constant=float(np.min(ratios)),
    )


def _survival(s, d):
    s = np.asarray(s, dtype=float)
    out = np.ones_like(s)
    term = np.ones_like(s)
    for k in range(1, d):
        term = term * s / k
        out = out + term
    return out
