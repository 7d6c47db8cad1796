"""Function and set representations the operator engine integrates against.

A SeparableFunction is a finite sum of tensor products of one-dimensional
pieces (box indicators, power-exponential profiles, tabulated grid
functions).  Keeping inputs in this class makes every d-dimensional kernel
integral a product of one-dimensional integrals, which is what makes d = 4
experiments feasible.

A BoxUnion is a finite disjoint union of axis-aligned boxes in R_+^d, used
both for characteristic-function inputs and for level-set realizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln


class SignedFunctionError(ValueError):
    """Raised when |f| of a multi-term signed separable function is needed:
    |sum| != sum|.| breaks separability, so such inputs are rejected."""


class NormDivergenceError(ArithmeticError):
    """Raised when a requested norm integral diverges."""


# ---------------------------------------------------------------------------
# one-dimensional pieces


@dataclass(frozen=True)
class Box:
    """Indicator of the interval (lo, hi); 0 <= lo < hi < inf."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi < math.inf):
            raise ValueError(f"box bounds must satisfy 0 <= lo < hi < inf, got ({self.lo}, {self.hi})")

    @property
    def support(self):
        return (self.lo, self.hi)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return ((x > self.lo) & (x < self.hi)).astype(float)

    def log_value(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x > self.lo) & (x < self.hi), 0.0, -np.inf)

    def integral(self, lo, hi):
        """Integral of the piece over (lo, hi)."""
        return max(0.0, min(hi, self.hi) - max(lo, self.lo))

    def pow_integral(self, r):
        """Integral of piece^r over the support (indicator: independent of r)."""
        return self.hi - self.lo

    def mass(self):
        return self.hi - self.lo


@dataclass(frozen=True)
class PowerExp:
    """Profile x^p e^{-q x} on (lo, hi); p > -1, q >= 0, and hi = inf
    requires q > 0 so the mass is finite."""

    p: float
    q: float
    lo: float = 0.0
    hi: float = math.inf

    def __post_init__(self):
        if not self.p > -1.0:
            raise ValueError("power must be > -1 (integrability at 0)")
        if self.q < 0.0:
            raise ValueError("decay rate must be >= 0")
        if not (0.0 <= self.lo < self.hi):
            raise ValueError("bounds must satisfy 0 <= lo < hi")
        if math.isinf(self.hi) and self.q <= 0.0:
            raise ValueError("unbounded support requires q > 0")

    @property
    def support(self):
        return (self.lo, self.hi)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            v = np.exp(self.log_value(x))
        return v

    def log_value(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            lv = self.p * np.log(x) - self.q * x
        return np.where((x > self.lo) & (x < self.hi), lv, -np.inf)

    def integral(self, lo, hi):
        return _powexp_integral(self.p, self.q, max(lo, self.lo), min(hi, self.hi))

    def pow_integral(self, r):
        """Integral of (x^p e^{-qx})^r over the support; raises on divergence."""
        pr, qr = self.p * r, self.q * r
        if pr <= -1.0 and self.lo == 0.0:
            raise NormDivergenceError(
                f"x^{pr} is not integrable at 0 (power profile raised to {r})"
            )
        if math.isinf(self.hi) and qr <= 0.0:
            raise NormDivergenceError("power profile raised to a nonpositive decay")
        return _powexp_integral(pr, qr, self.lo, self.hi)

    def mass(self):
        return self.integral(self.lo, self.hi)

    def effective_hi(self, drop_nats: float = 46.0):
        """Point beyond which the profile contributes negligibly."""
        if math.isfinite(self.hi):
            return self.hi
        # peak of x^p e^{-qx} at p/q; decay scale 1/q
        peak = max(self.p, 0.0) / self.q
        return peak + (drop_nats + abs(self.p) + 10.0) / self.q


def _powexp_integral(p, q, lo, hi):
    """Exact integral of x^p e^{-qx} on (lo, hi), p > -1, q >= 0."""
    if hi <= lo:
        return 0.0
    if q == 0.0:
        if math.isinf(hi):
            raise NormDivergenceError("x^p with q = 0 has infinite mass")
        return (hi ** (p + 1.0) - lo ** (p + 1.0)) / (p + 1.0)
    # Gamma(p+1) q^{-(p+1)} [P(p+1, q hi) - P(p+1, q lo)], P regularized
    hi_t = 1.0 if math.isinf(hi) else gammainc(p + 1.0, q * hi)
    lo_t = gammainc(p + 1.0, q * lo)
    return math.exp(gammaln(p + 1.0) - (p + 1.0) * math.log(q)) * (hi_t - lo_t)


@dataclass(frozen=True)
class GridFn:
    """Nonnegative tabulated function with linear interpolation, 0 outside."""

    xs: tuple
    ys: tuple

    def __init__(self, xs, ys):
        xs = tuple(float(v) for v in xs)
        ys = tuple(float(v) for v in ys)
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("grid needs matching xs/ys with at least 2 nodes")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("grid xs must be strictly increasing")
        if xs[0] < 0.0:
            raise ValueError("grid must live on the positive half-line")
        if any(y < 0.0 for y in ys):
            raise ValueError("grid values must be nonnegative")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def support(self):
        return (self.xs[0], self.xs[-1])

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, self.xs, self.ys, left=0.0, right=0.0)

    def log_value(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.value(x))

    def integral(self, lo, hi):
        lo = max(lo, self.xs[0])
        hi = min(hi, self.xs[-1])
        if hi <= lo:
            return 0.0
        xs = np.asarray(self.xs)
        inner = xs[(xs > lo) & (xs < hi)]
        nodes = np.concatenate(([lo], inner, [hi]))
        return float(np.trapezoid(self.value(nodes), nodes))

    def pow_integral(self, r):
        # refine each cell: (linear)**r is not piecewise linear
        xs = np.asarray(self.xs)
        fine = np.unique(np.concatenate([np.linspace(a, b, 9) for a, b in zip(xs, xs[1:])]))
        return float(np.trapezoid(self.value(fine) ** r, fine))

    def mass(self):
        return self.integral(*self.support)


PIECE_TYPES = (Box, PowerExp, GridFn)


# ---------------------------------------------------------------------------
# separable functions


class SeparableFunction:
    """Finite sum of tensor products of one-dimensional pieces.

    terms: list of (coefficient, (piece_1, ..., piece_d)).
    """

    def __init__(self, terms):
        terms = [(float(c), tuple(ps)) for c, ps in terms]
        if not terms:
            raise ValueError("need at least one term")
        d = len(terms[0][1])
        for c, ps in terms:
            if len(ps) != d:
                raise ValueError("all terms must have the same dimension")
            for p in ps:
                if not isinstance(p, PIECE_TYPES):
                    raise TypeError(f"unsupported piece type {type(p)!r}")
        self.terms = terms
        self.d = d

    @classmethod
    def indicator_box(cls, lows, highs, coeff: float = 1.0):
        lows = np.atleast_1d(np.asarray(lows, dtype=float))
        highs = np.atleast_1d(np.asarray(highs, dtype=float))
        return cls([(coeff, tuple(Box(lo, hi) for lo, hi in zip(lows, highs)))])

    @classmethod
    def cube(cls, d: int, lo: float, hi: float, coeff: float = 1.0):
        return cls.indicator_box([lo] * d, [hi] * d, coeff)

    def evaluate(self, x):
        """Pointwise values at x of shape (n, d) (or (d,))."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.d:
            raise ValueError(f"points must have dimension {self.d}")
        out = np.zeros(x.shape[0])
        for c, ps in self.terms:
            v = np.full(x.shape[0], c)
            for i, p in enumerate(ps):
                v = v * p.value(x[:, i])
            out += v
        return out[0] if single else out

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c, _ in self.terms)

    def absolute(self) -> "SeparableFunction":
        """|f| within the class: single-term inputs get |coefficient|;
        signed multi-term inputs are rejected (|sum| is not separable)."""
        if len(self.terms) == 1:
            c, ps = self.terms[0]
            return SeparableFunction([(abs(c), ps)])
        if not self.is_nonnegative():
            raise SignedFunctionError(
                "multi-term signed separable functions are rejected; "
                "apply the operator to each term or supply |f| directly"
            )
        return self

    def support_box(self):
        """Axis-aligned hull of the support."""
        lows = np.full(self.d, math.inf)
        highs = np.zeros(self.d)
        for _, ps in self.terms:
            for i, p in enumerate(ps):
                lo, hi = p.support
                lows[i] = min(lows[i], lo)
                highs[i] = max(highs[i], hi)
        return lows, highs

    def mass(self) -> float:
        return sum(c * float(np.prod([p.mass() for p in ps])) for c, ps in self.terms)

    def axis_functions(self):
        """For a single-term function, the list of 1-D factors."""
        if len(self.terms) != 1:
            raise ValueError("axis_functions needs a single-term function")
        return self.terms[0]


# ---------------------------------------------------------------------------
# box unions


class BoxUnion:
    """Finite union of axis-aligned boxes in R_+^d with disjoint interiors."""

    def __init__(self, lows, highs):
        lows = np.atleast_2d(np.asarray(lows, dtype=float))
        highs = np.atleast_2d(np.asarray(highs, dtype=float))
        if lows.shape != highs.shape:
            raise ValueError("lows/highs shape mismatch")
        if np.any(lows < 0) or np.any(highs <= lows):
            raise ValueError("boxes must satisfy 0 <= lo < hi componentwise")
        self.lows = lows
        self.highs = highs
        self._check_disjoint()

    def _check_disjoint(self):
        n = len(self.lows)
        for i in range(n):
            for j in range(i + 1, n):
                if np.all(
                    (self.lows[i] < self.highs[j]) & (self.lows[j] < self.highs[i])
                ):
                    raise ValueError(f"boxes {i} and {j} have overlapping interiors")

    @property
    def d(self) -> int:
        return self.lows.shape[1]

    @property
    def n_boxes(self) -> int:
        return self.lows.shape[0]

    @property
    def measure(self) -> float:
        return float(np.sum(np.prod(self.highs - self.lows, axis=1)))

    def contains(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        inside = (x[:, None, :] > self.lows[None]) & (x[:, None, :] < self.highs[None])
        return np.any(np.all(inside, axis=2), axis=1)

    def evaluate(self, x):
        return self.contains(x).astype(float)

    def intersection_measure(self, lows, highs):
        """Measure of the intersection with one box."""
        lo = np.maximum(self.lows, np.asarray(lows, dtype=float))
        hi = np.minimum(self.highs, np.asarray(highs, dtype=float))
        edges = np.clip(hi - lo, 0.0, None)
        return float(np.sum(np.prod(edges, axis=1)))

    def bounding_box(self):
        return self.lows.min(axis=0), self.highs.max(axis=0)

    def as_indicator(self) -> SeparableFunction:
        """Indicator as a sum of tensor-product box terms (valid because the
        boxes are disjoint)."""
        return SeparableFunction(
            [
                (1.0, tuple(Box(lo, hi) for lo, hi in zip(ls, hs)))
                for ls, hs in zip(self.lows, self.highs)
            ]
        )
