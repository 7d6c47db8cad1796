"""One-dimensional heat kernel for Laguerre expansions, its D/E comparison
pieces, the tensor-product kernel, and the upper/lower envelope bounds.

All kernel values are assembled in log space (log prefactor + log Bessel +
exponent terms) and exponentiated once at the end: for t = 1e-3 the Bessel
argument sqrt(xi eta)/sinh(t) can exceed 1e5 and a naive evaluation
overflows.  Underflow to zero is permitted (the kernel decays doubly
exponentially); overflow is a defect and raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .special import log_bessel_i_from_log

__all__ = [
    "KernelParams1D",
    "TypeMultiIndex",
    "log_h1d",
    "h1d",
    "h_product",
    "d_piece",
    "e_piece",
    "upper_envelope",
    "lower_bound_a",
    "lower_bound_b",
    "EnvelopeConstants",
    "EnvelopeFit",
    "calibrate_envelope",
]

_LOG_MAX = 709.0

# Decay constants of the upper envelope.  The first-term pair must stay below
# tanh(t/2)/(2t) ~ 1/4 and the Gaussian comparison bound ~ 1/(18 sinh 1);
# the second-term constant below t/(10 sinh t) ~ 1/12.  Chosen with margin so
# the fitted comparison constant is finite over the whole sampling cloud.
DEFAULT_C1 = 1.0 / 32.0
DEFAULT_C2 = 1.0 / 16.0


@dataclass(frozen=True)
class KernelParams1D:
    """Type parameter and time of the one-dimensional kernel."""

    a: float
    t: float

    def __post_init__(self):
        if not self.a > -1.0:
            raise ValueError(f"type parameter must be > -1, got {self.a}")
        if not self.t > 0.0:
            raise ValueError(f"time must be positive, got {self.t}")


@dataclass(frozen=True)
class TypeMultiIndex:
    """Type vector alpha in (-1, inf)^d with its derived quantities.

    tilde_alpha / tilde_d are recomputed on access, never cached, so they can
    not go stale.
    """

    alpha: tuple

    def __init__(self, alpha):
        alpha = tuple(float(v) for v in np.atleast_1d(alpha))
        if len(alpha) < 1:
            raise ValueError("alpha must have at least one component")
        if any(not v > -1.0 for v in alpha):
            raise ValueError(f"every component of alpha must be > -1, got {alpha}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def d(self) -> int:
        return len(self.alpha)

    @property
    def tilde_alpha(self) -> float:
        return min(self.alpha)

    def tilde_d(self, min_tol: float = 0.0) -> int:
        """Number of minimal components; min_tol > 0 counts near-minimal
        components as minimal (the classification is discontinuous in alpha,
        and sweeps may want to see that)."""
        m = self.tilde_alpha
        return sum(1 for v in self.alpha if v <= m + min_tol)

    @property
    def total(self) -> float:
        return float(sum(self.alpha))


def _log_sinh(t):
    t = np.asarray(t, dtype=float)
    return t - np.log(2.0) + np.log1p(-np.exp(-2.0 * t))


def _coth(t):
    return 1.0 / np.tanh(np.asarray(t, dtype=float))


def log_h1d(a, t, xi, eta):
    """log of the one-dimensional kernel at (xi, eta), time t, type a.

    Vectorized over t, xi and eta (broadcasting)."""
    a = float(a)
    t = np.asarray(t, dtype=float)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    if np.any(xi <= 0) or np.any(eta <= 0):
        raise ValueError("kernel arguments must be positive")
    ls = _log_sinh(t)
    log_z = 0.5 * (np.log(xi) + np.log(eta)) - ls
    return (
        (1.0 + a) * t
        - np.log(2.0)
        - ls
        - 0.5 * _coth(t) * (xi + eta)
        + log_bessel_i_from_log(a, log_z)
    )


def _safe_exp(logv):
    logv = np.asarray(logv, dtype=float)
    if np.any(logv > _LOG_MAX):
        raise OverflowError("kernel value overflows float64; use the log form")
    return np.exp(logv)


def h1d(p: KernelParams1D, xi, eta):
    """One-dimensional kernel value; symmetric in (xi, eta) by construction."""
    out = _safe_exp(log_h1d(p.a, p.t, xi, eta))
    return float(out) if np.ndim(xi) == 0 and np.ndim(eta) == 0 else out


def h_product(alpha: TypeMultiIndex, t, x, y):
    """Tensor-product kernel: product of per-coordinate 1-D kernels."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape[-1] != alpha.d or y.shape[-1] != alpha.d:
        raise ValueError("point dimension does not match alpha")
    logv = sum(
        log_h1d(alpha.alpha[i], t, x[..., i], y[..., i]) for i in range(alpha.d)
    )
    out = _safe_exp(logv)
    return float(out) if np.ndim(out) == 0 else out


def log_d_piece(a, t, xi, eta):
    a = float(a)
    t = np.asarray(t, dtype=float)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    return (
        (1.0 + a) * t
        - (a + 1.0) * _log_sinh(t)
        + 0.5 * a * (np.log(xi) + np.log(eta))
        - 0.5 * _coth(t) * (xi + eta)
    )


def d_piece(p: KernelParams1D, xi, eta):
    """Comparison piece for the regime sqrt(xi eta) <= sinh t."""
    out = _safe_exp(log_d_piece(p.a, p.t, xi, eta))
    return float(out) if np.ndim(xi) == 0 and np.ndim(eta) == 0 else out


def log_e_piece(a, t, xi, eta, cancellation_free: bool = True):
    a = float(a)
    t = np.asarray(t, dtype=float)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    base = (
        (1.0 + a) * t
        - 0.5 * _log_sinh(t)
        - 0.25 * (np.log(xi) + np.log(eta))
    )
    if cancellation_free:
        # (xi-eta)^2/(sqrt(xi)+sqrt(eta))^2 = (sqrt(xi)-sqrt(eta))^2; the
        # second factor uses (1 - cosh t)/(2 sinh t) = -tanh(t/2)/2
        gauss = (xi - eta) ** 2 / (np.sqrt(xi) + np.sqrt(eta)) ** 2
        return base - gauss / (2.0 * np.sinh(t)) - 0.5 * np.tanh(0.5 * t) * (xi + eta)
    return base - 0.5 * _coth(t) * (xi + eta) + np.exp(
        0.5 * (np.log(xi) + np.log(eta)) - _log_sinh(t)
    )


def e_piece(p: KernelParams1D, xi, eta, cancellation_free: bool = True):
    """Comparison piece for the regime sqrt(xi eta) > sinh t.

    The default form rewrites the exponent with (xi-eta)^2/(sqrt(xi)+sqrt(eta))^2
    and avoids the cancellation of -coth(t)(xi+eta)/2 + sqrt(xi eta)/sinh(t).
    """
    out = _safe_exp(log_e_piece(p.a, p.t, xi, eta, cancellation_free))
    return float(out) if np.ndim(xi) == 0 and np.ndim(eta) == 0 else out


def in_d_regime(t, xi, eta):
    """True where sqrt(xi eta) <= sinh t (ties go to the D branch)."""
    return 0.5 * (np.log(xi) + np.log(eta)) <= _log_sinh(t)


@dataclass(frozen=True)
class EnvelopeConstants:
    """Decay constants of the two envelope terms, fitted independently."""

    c1: float = DEFAULT_C1
    c2: float = DEFAULT_C2


def log_upper_envelope(a, t, xi, eta, consts: EnvelopeConstants | None = None):
    """log of the two-term upper envelope; t > 1 is evaluated at t = 1."""
    consts = consts or EnvelopeConstants()
    a = float(a)
    te = np.minimum(np.asarray(t, dtype=float), 1.0)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    log_t1 = (
        -0.5 * np.log(te * xi)
        - consts.c1 * (xi - eta) ** 2 / (te * xi)
        - consts.c1 * te * (xi + eta)
    )
    log_t2 = (
        0.5 * a * (np.log(xi) + np.log(eta))
        - (a + 1.0) * np.log(te)
        - consts.c2 * (xi + eta) / te
    )
    return np.logaddexp(log_t1, log_t2)


def upper_envelope(p: KernelParams1D, xi, eta, consts: EnvelopeConstants | None = None):
    """Two-term upper envelope; multiply by the fitted comparison constant to
    dominate the kernel."""
    out = _safe_exp(log_upper_envelope(p.a, p.t, xi, eta, consts))
    return float(out) if np.ndim(xi) == 0 and np.ndim(eta) == 0 else out


def lower_bound_a(p: KernelParams1D, xi, eta):
    """Unit lower bound, valid for 0 < t <= 1/4, 1/(2t) <= xi <= 2/t and
    |xi - eta| < 1; None outside that window.  (The window is taken closed:
    the kernel is continuous, so the bound extends to the edges.)"""
    t, xi, eta = float(p.t), float(xi), float(eta)
    if t <= 0.25 and (0.5 / t) <= xi <= (2.0 / t) and abs(xi - eta) < 1.0:
        return 1.0
    return None


def lower_bound_b(p: KernelParams1D, xi, eta):
    """(xi eta)^{a/2} / t^{a+1} lower bound, valid for 0 < t <= 1 and
    xi, eta <= 2t (window taken closed); None outside."""
    a, t, xi, eta = p.a, float(p.t), float(xi), float(eta)
    if t <= 1.0 and 0.0 < xi <= 2.0 * t and 0.0 < eta <= 2.0 * t:
        return float(np.exp(0.5 * a * (np.log(xi) + np.log(eta)) - (a + 1.0) * np.log(t)))
    return None


def _log_lower_bound_b(a, t, xi, eta):
    return 0.5 * a * (np.log(xi) + np.log(eta)) - (a + 1.0) * np.log(t)


@dataclass
class EnvelopeFit:
    """Comparison constants fitted over a declared sample cloud."""

    a: float
    consts: EnvelopeConstants
    c_upper: float  # max over cloud of kernel / envelope
    c_lower_a: float | None  # min over cloud of kernel / bound, regime (a)
    c_lower_b: float | None
    n_samples: int
    n_lower_a: int = 0
    n_lower_b: int = 0
    cloud: dict = field(default_factory=dict)


def _sample_cloud(n, seed, t_range, x_range):
    rng = np.random.Generator(np.random.Philox(key=seed))
    lt = rng.uniform(np.log(t_range[0]), np.log(t_range[1]), n)
    lx = rng.uniform(np.log(x_range[0]), np.log(x_range[1]), n)
    ly = rng.uniform(np.log(x_range[0]), np.log(x_range[1]), n)
    return np.exp(lt), np.exp(lx), np.exp(ly)


def calibrate_envelope(
    a: float,
    n: int = 100_000,
    seed: int = 0,
    t_range=(1e-3, 1.0),
    x_range=(1e-3, 1e2),
    consts: EnvelopeConstants | None = None,
) -> EnvelopeFit:
    """Fit the comparison constants over a log-uniform cloud of (t, xi, eta).

    The best upper constant is the largest observed kernel/envelope ratio (so
    kernel <= C * envelope with zero violations on the cloud); the lower
    constants are the smallest observed kernel/bound ratios on the points
    where each bound's regime applies.
    """
    consts = consts or EnvelopeConstants()
    t, xi, eta = _sample_cloud(n, seed, t_range, x_range)
    lk = log_h1d(a, t, xi, eta)
    le = log_upper_envelope(a, t, xi, eta, consts)
    c_upper = float(np.exp(np.max(lk - le)))

    mask_a = (t <= 0.25) & (xi >= 0.5 / t) & (xi <= 2.0 / t) & (np.abs(xi - eta) < 1.0)
    c_lower_a = None
    if np.any(mask_a):
        c_lower_a = float(np.exp(np.min(lk[mask_a])))
    mask_b = (t <= 1.0) & (xi <= 2.0 * t) & (eta <= 2.0 * t)
    c_lower_b = None
    if np.any(mask_b):
        llb = _log_lower_bound_b(a, t[mask_b], xi[mask_b], eta[mask_b])
        c_lower_b = float(np.exp(np.min(lk[mask_b] - llb)))

    return EnvelopeFit(
        a=a,
        consts=consts,
        c_upper=c_upper,
        c_lower_a=c_lower_a,
        c_lower_b=c_lower_b,
        n_samples=n,
        n_lower_a=int(mask_a.sum()),
        n_lower_b=int(mask_b.sum()),
        cloud={"t_range": list(t_range), "x_range": list(x_range), "seed": seed},
    )
