"""Critical exponents and the boundedness classification of the maximal
operator as a function of (alpha, d, p).

The classification implements the full decision table: standard behavior for
min(alpha) >= 0; for -1 < min(alpha) < 0 an open strong-type interval
(p0, p1), endpoint behavior governed by the multiplicity of the minimal
component (plain weak / restricted-weak types when it is 1, logarithmic
refinements with exponent multiplicity-1 for d = 2, 3, and no endpoint
estimate at all from d = 4 on), and nothing outside [p0, p1].
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .kernel import TypeMultiIndex

__all__ = [
    "Regime",
    "PencilExponents",
    "RegimeVerdict",
    "STANDARD",
    "exponents",
    "classify",
    "pencil_sweep",
]

_CONJ_TOL = 1e-14
_ENDPOINT_REL_TOL = 1e-12


class Regime(str, Enum):
    STRONG = "strong"
    WEAK_P1 = "weak-p1"
    RESTRICTED_WEAK_P0 = "restricted-weak-p0"
    LOG_WEAK_P1 = "log-weak-p1"
    LOG_RESTRICTED_WEAK_P0 = "log-restricted-weak-p0"
    UNBOUNDED = "unbounded"
    STANDARD_WEAK_11 = "standard-weak-11"
    STANDARD_STRONG = "standard-strong"
    NOT_COVERED = "not-covered"


STANDARD = "standard"


@dataclass(frozen=True)
class PencilExponents:
    """Derived exponents for tilde_alpha in (-1, 0)."""

    tilde_alpha: float
    tilde_d: int
    p0: float
    p1: float

    def __post_init__(self):
        if not -1.0 < self.tilde_alpha < 0.0:
            raise ValueError("exponents only exist for tilde_alpha in (-1, 0)")
        if abs(1.0 / self.p0 + 1.0 / self.p1 - 1.0) > _CONJ_TOL:
            raise ValueError("p0 and p1 must be conjugate")


@dataclass(frozen=True)
class RegimeVerdict:
    regime: Regime
    N: int | None = None  # log exponent, = tilde_d - 1 where applicable
    p0: float | None = None
    p1: float | None = None
    note: str = ""


def exponents(alpha, min_tol: float = 0.0):
    """PencilExponents for tilde_alpha < 0, or the STANDARD flag otherwise."""
    if not isinstance(alpha, TypeMultiIndex):
        alpha = TypeMultiIndex(alpha)
    ta = alpha.tilde_alpha
    if ta >= 0.0:
        return STANDARD
    p1 = -2.0 / ta
    p0 = 2.0 / (2.0 + ta)
    return PencilExponents(tilde_alpha=ta, tilde_d=alpha.tilde_d(min_tol), p0=p0, p1=p1)


def classify(
    alpha,
    p: float | None = None,
    endpoint: str | None = None,
    lorentz_q: float | None = None,
    min_tol: float = 0.0,
) -> RegimeVerdict:
    """Predicted boundedness regime at exponent p (or an endpoint tag).

    endpoint is one of "p0-endpoint" / "p1-endpoint"; lorentz_q asks about a
    Lorentz refinement L^{p,q} strictly between the stated endpoint spaces,
    which the classification does not cover.
    """
    if not isinstance(alpha, TypeMultiIndex):
        alpha = TypeMultiIndex(alpha)
    if (p is None) == (endpoint is None):
        raise ValueError("pass exactly one of p or endpoint")
    if endpoint is not None and endpoint not in ("p0-endpoint", "p1-endpoint"):
        raise ValueError("endpoint must be 'p0-endpoint' or 'p1-endpoint'")

    ex = exponents(alpha, min_tol)
    if ex is STANDARD:
        if endpoint is not None:
            raise ValueError("endpoint tags are meaningless when min(alpha) >= 0")
        if p == 1.0:
            return RegimeVerdict(Regime.STANDARD_WEAK_11)
        if p > 1.0:
            return RegimeVerdict(Regime.STANDARD_STRONG)
        return RegimeVerdict(Regime.UNBOUNDED, note="below L^1")

    d = alpha.d
    td = ex.tilde_d
    if lorentz_q is not None and 1.0 < lorentz_q < np.inf:
        return RegimeVerdict(
            Regime.NOT_COVERED,
            p0=ex.p0,
            p1=ex.p1,
            note="Lorentz refinements strictly between the endpoint spaces "
            "are not classified",
        )

    if endpoint is None:
        if abs(p - ex.p1) <= _ENDPOINT_REL_TOL * ex.p1:
            endpoint = "p1-endpoint"
        elif abs(p - ex.p0) <= _ENDPOINT_REL_TOL * ex.p0:
            endpoint = "p0-endpoint"
        elif ex.p0 < p < ex.p1:
            return RegimeVerdict(Regime.STRONG, p0=ex.p0, p1=ex.p1)
        else:
            return RegimeVerdict(
                Regime.UNBOUNDED,
                p0=ex.p0,
                p1=ex.p1,
                note="no boundedness of any kind outside [p0, p1]",
            )

    if endpoint == "p1-endpoint":
        if td == 1:
            return RegimeVerdict(Regime.WEAK_P1, p0=ex.p0, p1=ex.p1)
        if d <= 3:
            return RegimeVerdict(Regime.LOG_WEAK_P1, N=td - 1, p0=ex.p0, p1=ex.p1)
        return RegimeVerdict(
            Regime.UNBOUNDED,
            p0=ex.p0,
            p1=ex.p1,
            note="d >= 4 with >= 2 minimal components: some f in L^{p1,1} has "
            "every level set of infinite measure",
        )
    # p0 endpoint
    if td == 1:
        return RegimeVerdict(Regime.RESTRICTED_WEAK_P0, p0=ex.p0, p1=ex.p1)
    if d <= 3:
        return RegimeVerdict(
            Regime.LOG_RESTRICTED_WEAK_P0, N=td - 1, p0=ex.p0, p1=ex.p1
        )
    return RegimeVerdict(
        Regime.UNBOUNDED,
        p0=ex.p0,
        p1=ex.p1,
        note="d >= 4 with >= 2 minimal components: the restricted-weak bound "
        "fails for every power of the logarithm",
    )


def pencil_sweep(
    a_min: float = -0.99,
    a_max: float = 1.0,
    n_alpha: int = 80,
    inv_p_points: int = 81,
):
    """Rows (alpha, p, 1/p, regime) over a 1-D (alpha, 1/p) grid; the data
    behind the pencil-shaped region diagram."""
    rows = []
    for a in np.linspace(a_min, a_max, n_alpha):
        alpha = TypeMultiIndex([float(a)])
        for inv_p in np.linspace(0.01, 0.99, inv_p_points):
            p = 1.0 / inv_p
            verdict = classify(alpha, p=p)
            rows.append(
                {
                    "alpha": float(a),
                    "p": float(p),
                    "inv_p": float(inv_p),
                    "regime": verdict.regime.value,
                }
            )
    return rows
