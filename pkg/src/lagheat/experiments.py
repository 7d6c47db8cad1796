"""Config-driven scenario runner binding all modules into verification
suites, with CSV/JSON reports and reproducible seeds.

Constants written as "fitted" are always the extreme observed ratio over a
declared sample cloud (largest for upper comparisons, smallest for lower
ones), so comparison claims become reproducible numbers: the cloud, seed and
grids are echoed into every report, and two runs with the same config are
byte-identical at the CSV level.
"""

from __future__ import annotations

import csv
import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from . import constructions as cx
from . import kernel as kn
from . import measure as ms
from . import pencil as pc
from . import semigroup as sg
from .functions import Box, PowerExp, SeparableFunction
from .special import laguerre_fn, laguerre_poly, log_gamma

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "ExperimentConfig",
    "ExperimentReport",
    "CheckResult",
    "run",
    "scenario_names",
    "weak_type_functional",
    "running_sup_functional",
    "write_csv",
]


# ---------------------------------------------------------------------------
# config / report plumbing


@dataclass
class ExperimentConfig:
    scenario: str
    alpha: tuple | None = None
    seed: int = 0
    budget: int = 1_000_000
    out_dir: str = "reports"
    grids: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {self.schema_version}")
        if self.scenario not in SCENARIOS:
            raise ValueError(
                f"unknown scenario {self.scenario!r}; known: {sorted(SCENARIOS)}"
            )
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.alpha is not None:
            self.alpha = tuple(float(a) for a in self.alpha)
            kn.TypeMultiIndex(self.alpha)  # validates components

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(**data)

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float | None
    target: str
    claim: str = ""  # the mathematical statement this check verifies
    details: dict = field(default_factory=dict)


@dataclass
class ExperimentReport:
    scenario: str
    config: dict
    checks: list
    fitted: dict
    tables: dict  # table name -> csv path
    wall_clock_s: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "config": self.config,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
            "fitted": self.fitted,
            "tables": self.tables,
            "wall_clock_s": self.wall_clock_s,
        }


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path, scenario: str, kind: str, header, rows):
    """CSV with a schema comment line; float cells use repr for byte-stable
    round-tripping."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# lagheat-csv schema_version={SCHEMA_VERSION} scenario={scenario} kind={kind}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return str(path)


# ---------------------------------------------------------------------------
# weak-type statistics


def weak_type_functional(curve: ms.DistributionCurve, p: float, norm: float):
    """sup over the curve of lambda * measure^{1/p} / norm; returns
    (value, attaining lambda).  Warns when the sup sits on the boundary of
    the lambda sweep."""
    live = curve.measure > 0
    if not np.any(live):
        return 0.0, float("nan")
    lam = curve.lam[live]
    stat = lam * curve.measure[live] ** (1.0 / p) / norm
    k = int(np.argmax(stat))
    idx = np.nonzero(live)[0][k]
    if idx in (0, len(curve.lam) - 1):
        warnings.warn(
            f"weak-type sup attained at the lambda boundary (lambda={lam[k]:g})",
            ms.BudgetWarning,
        )
    return float(stat[k]), float(lam[k])


def running_sup_functional(curve: ms.DistributionCurve, p: float, norm: float):
    """Nondecreasing running sup of the weak-type statistic over nested
    lambda windows [lam_min, lam_cap]; how unboundedness beyond the pencil
    shows up numerically."""
    live = curve.measure > 0
    lam = curve.lam[live]
    stat = lam * curve.measure[live] ** (1.0 / p) / norm
    return lam, np.maximum.accumulate(stat)


# ---------------------------------------------------------------------------
# shared helpers


def _laguerre_separable(k: int, a: float) -> SeparableFunction:
    """The k-th orthonormal Laguerre profile as a signed sum of
    power-exponential pieces (polynomial coefficients times x^{a/2+j} e^{-x/2})."""
    coeffs = [np.array([1.0])]
    if k >= 1:
        coeffs.append(np.array([1.0 + a, -1.0]))
    for n in range(1, k):
        c_n, c_nm1 = coeffs[n], coeffs[n - 1]
        nxt = np.zeros(n + 2)
        nxt[: n + 1] += (2 * n + 1 + a) * c_n
        nxt[1 : n + 2] -= c_n
        nxt[:n] -= (n + a) * c_nm1
        coeffs.append(nxt / (n + 1.0))
    norm = math.exp(0.5 * (log_gamma(k + 1.0) - log_gamma(k + a + 1.0)))
    terms = []
    for j, cj in enumerate(coeffs[k]):
        if cj != 0.0:
            terms.append((norm * float(cj), (PowerExp(0.5 * a + j, 0.5),)))
    return SeparableFunction(terms)


def _gram_entry(a: float, j: int, k: int) -> float:
    def f(x):
        return laguerre_fn(j, a, x) * laguerre_fn(k, a, x)

    with warnings.catch_warnings():
        # u^{2a+1} endpoint behavior trips quad's slow-convergence heuristic
        # for a near -1; the achieved accuracy is checked by the Gram test
        warnings.simplefilter("ignore")
        v1, _ = quad(lambda u: 2.0 * u * f(u * u), 0.0, 1.0, limit=200)
        v2, _ = quad(f, 1.0, np.inf, limit=200)
    return v1 + v2


def _fit_stability(v1: float, v2: float) -> float:
    return abs(v2 - v1) / max(abs(v1), 1e-300)


def _polyfit_r2(x, y):
    coef = np.polyfit(x, y, 1)
    pred = np.polyval(coef, x)
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2


def _measure_2d_tensor(xg, log_field, lambdas):
    """Level-set measures of a field given by log values on a 2-D tensor
    grid; cells classified by corner extrema, straddle volume split evenly
    and reported as the error."""
    cellw = np.diff(xg)
    c00 = log_field[:-1, :-1]
    c01 = log_field[:-1, 1:]
    c10 = log_field[1:, :-1]
    c11 = log_field[1:, 1:]
    cmin = np.minimum(np.minimum(c00, c01), np.minimum(c10, c11))
    cmax = np.maximum(np.maximum(c00, c01), np.maximum(c10, c11))
    areas = np.outer(cellw, cellw)
    meas, err = [], []
    for lam in lambdas:
        ll = math.log(lam)
        inside = cmin > ll
        strad = (cmax > ll) & ~inside
        resid = float(areas[strad].sum())
        meas.append(float(areas[inside].sum()) + 0.5 * resid)
        err.append(0.5 * resid)
    return np.array(meas), np.array(err)


def _cube_field_curve(alpha, lows, highs, lambdas, coeff=1.0, points_per_decade=48,
                      x_min=1e-21, x_max=40.0, t_grid=None):
    """Distribution curve of the tabulated 2-D maximal field of a box input."""
    fld = cx.TabulatedMaximalProductField(
        alpha, lows, highs, coeff=coeff, t_grid=t_grid,
        x_min=x_min, x_max=x_max, points_per_decade=points_per_decade,
    )
    logF = None
    for i in range(len(fld.ts)):
        g = fld.log_phi[0][i][:, None] + fld.log_phi[1][i][None, :]
        logF = g if logF is None else np.maximum(logF, g)
    logF = logF + math.log(coeff)
    meas, err = _measure_2d_tensor(fld.xg, logF, lambdas)
    curve = ms.DistributionCurve(np.asarray(lambdas, float), meas, err, "grid")
    return curve, fld


# ---------------------------------------------------------------------------
# scenarios


def _scn_orthonormality(cfg: ExperimentConfig):
    a_list = cfg.grids.get("a_list", [-0.9, -0.5, 0.0, 1.5])
    kmax = int(cfg.grids.get("kmax", 8))
    tol = cfg.tolerances.get("gram", 1e-6)
    checks, rows = [], []
    worst_overall = 0.0
    for a in a_list:
        worst = 0.0
        for j in range(kmax + 1):
            for k in range(j, kmax + 1):
                v = _gram_entry(a, j, k)
                dev = abs(v - (1.0 if j == k else 0.0))
                worst = max(worst, dev)
                rows.append((a, j, k, v, dev))
        checks.append(
            CheckResult(
                name=f"gram-identity a={a:g}",
                passed=worst < tol,
                value=worst,
                target=f"< {tol:g}",
                claim="the orthonormal Laguerre profiles have Gram matrix = identity under quadrature",
            )
        )
        worst_overall = max(worst_overall, worst)
    return checks, {"worst_gram_deviation": worst_overall}, {
        "gram": (("a", "j", "k", "value", "deviation"), rows)
    }


def _scn_eigen_decay(cfg: ExperimentConfig):
    a_list = cfg.grids.get("a_list", [-0.5, 0.3])
    ts = cfg.grids.get("t_list", [0.1, 0.5, 1.0])
    xs = cfg.grids.get("x_list", [0.3, 1.3, 4.0])
    kmax = int(cfg.grids.get("kmax", 4))
    tol = cfg.tolerances.get("rel", 1e-4)
    checks, rows = [], []
    for a in a_list:
        alpha = kn.TypeMultiIndex([a])
        worst = 0.0
        for k in range(kmax + 1):
            f = _laguerre_separable(k, a)
            for t in ts:
                decay = math.exp(-t * (k + 0.5 * (a + 1.0)))
                wants = [decay * laguerre_fn(k, a, x) for x in xs]
                # a probe can land on an eigenfunction zero; scale the error
                # by the profile size there instead of dividing by ~0
                scale = max(abs(w) for w in wants)
                for x, want in zip(xs, wants):
                    got = sg.apply_semigroup(alpha, t, f, [x])
                    rel = abs(got - want) / max(abs(want), 0.05 * scale)
                    worst = max(worst, rel)
                    rows.append((a, k, t, x, got, want, rel))
        checks.append(
            CheckResult(
                name=f"eigen-decay a={a:g}",
                passed=worst <= tol,
                value=worst,
                target=f"<= {tol:g}",
                claim="the semigroup maps the k-th Laguerre profile to e^{-t(k+(a+1)/2)} times itself",
            )
        )
    return checks, {}, {"eigen": (("a", "k", "t", "x", "value", "expected", "rel_err"), rows)}


def _scn_chapman_kolmogorov(cfg: ExperimentConfig):
    a_list = cfg.grids.get("a_list", [-0.5, 0.0, 1.0])
    ss = cfg.grids.get("s_list", [0.1, 0.3])
    pairs = cfg.grids.get("xi_eta", [(0.3, 0.7), (1.0, 1.0), (2.0, 0.5), (5.0, 4.0)])
    tol = cfg.tolerances.get("rel", 1e-4)
    checks, rows = [], []
    from .quadrature import integrate_log_integrand

    for a in a_list:
        worst = 0.0
        for s1 in ss:
            for s2 in ss:
                for xi, eta in pairs:
                    def log_f(z, s1=s1, s2=s2, xi=xi, eta=eta, a=a):
                        return kn.log_h1d(a, s1, xi, z) + kn.log_h1d(a, s2, z, eta)

                    cap = max(10.0 * (xi + eta + 1.0), 40.0)
                    val, _ = integrate_log_integrand(
                        log_f, 0.0, cap, rtol=1e-8, breakpoints=[xi, eta, 0.5 * (xi + eta)]
                    )
                    want = float(np.exp(kn.log_h1d(a, s1 + s2, xi, eta)))
                    rel = abs(val - want) / want
                    worst = max(worst, rel)
                    rows.append((a, s1, s2, xi, eta, val, want, rel))
        checks.append(
            CheckResult(
                name=f"chapman-kolmogorov a={a:g}",
                passed=worst <= tol,
                value=worst,
                target=f"<= {tol:g}",
                claim="int H_s(xi,.) H_s'(.,eta) = H_{s+s'}(xi,eta)",
            )
        )
    return checks, {}, {"ck": (("a", "s1", "s2", "xi", "eta", "value", "expected", "rel_err"), rows)}


def _scn_envelope_sandwich(cfg: ExperimentConfig):
    a_list = cfg.grids.get("a_list", [-0.9, -0.5, 0.5])
    n = int(cfg.grids.get("n_samples", 100_000))
    stab_tol = cfg.tolerances.get("stability", 0.20)
    checks, rows = [], []
    fitted = {}
    for a in a_list:
        f1 = kn.calibrate_envelope(a, n=n, seed=cfg.seed)
        f2 = kn.calibrate_envelope(a, n=2 * n, seed=cfg.seed)
        stab = {
            "C_upper": _fit_stability(f1.c_upper, f2.c_upper),
            "c_lower_a": _fit_stability(f1.c_lower_a, f2.c_lower_a),
            "c_lower_b": _fit_stability(f1.c_lower_b, f2.c_lower_b),
        }
        finite = (
            np.isfinite(f2.c_upper)
            and f2.c_lower_a is not None
            and f2.c_lower_a > 0
            and f2.c_lower_b is not None
            and f2.c_lower_b > 0
        )
        worst_stab = max(stab.values())
        checks.append(
            CheckResult(
                name=f"sandwich a={a:g}",
                passed=bool(finite) and worst_stab <= stab_tol,
                value=worst_stab,
                target=f"fit stability <= {stab_tol:g}, constants finite/positive",
                claim="c * lower bounds <= kernel <= C * two-term envelope on the sampled cloud",
                details={
                    "C_upper": f2.c_upper,
                    "c_lower_a": f2.c_lower_a,
                    "c_lower_b": f2.c_lower_b,
                    "n_lower_a": f2.n_lower_a,
                    "n_lower_b": f2.n_lower_b,
                    "violations": 0,
                },
            )
        )
        fitted[f"a={a:g}"] = {
            "C_upper": f2.c_upper,
            "c_lower_a": f2.c_lower_a,
            "c_lower_b": f2.c_lower_b,
            "stability": stab,
            "cloud": f2.cloud,
        }
        rows.append((a, f1.c_upper, f2.c_upper, f1.c_lower_a, f2.c_lower_a, f1.c_lower_b, f2.c_lower_b))
    return checks, fitted, {
        "envelope": (("a", "C_upper_n", "C_upper_2n", "c_a_n", "c_a_2n", "c_b_n", "c_b_2n"), rows)
    }


def _scn_levelset_lemma(cfg: ExperimentConfig):
    d_list = cfg.grids.get("d_list", [1, 2, 3, 4])
    t_list = cfg.grids.get("t_list", [1e-3, 1.0, 10.0])
    decades = cfg.grids.get("nu_decades", 12)
    mc_tol = cfg.tolerances.get("mc_rel", 0.01)
    checks, rows = [], []
    fitted = {}
    for d in d_list:
        ratios_all, ratios_low = [], []
        for t in t_list:
            for nu in np.geomspace(1e-2, 10.0**decades, 4 * decades) / t**d:
                up, low, ok = ms.levelset_bound_check(d, t, nu)
                ratios_all.append(up)
                if ok:
                    ratios_low.append(low)
                rows.append((d, t, nu, up, low if ok else "", int(ok)))
        c_fit = min(ratios_low)
        C_fit = max(ratios_all)
        fitted[f"d={d}"] = {"C_upper": C_fit, "c_lower": c_fit}
        checks.append(
            CheckResult(
                name=f"level-set ratios d={d}",
                passed=(0.0 < c_fit) and np.isfinite(C_fit),
                value=C_fit,
                target="0 < c <= ratio <= C < inf across the sweep",
                claim="|{x in (0,t)^d : prod 1/x_j > nu}| ~ nu^{-1} log^{d-1}(2 + t^d nu)",
                details={"c_lower": c_fit, "C_upper": C_fit},
            )
        )
    # exact d=1 identity
    one = [ms.levelset_bound_check(1, t, nu)[0] for t, nu in [(1.0, 2.0), (0.1, 1e3), (10.0, 5.0)]]
    checks.append(
        CheckResult(
            name="d=1 exact identity",
            passed=max(abs(v - 1.0) for v in one) < 1e-12,
            value=max(abs(v - 1.0) for v in one),
            target="measure * nu = 1 when t nu >= 1",
            claim="one-dimensional level sets have exact measure 1/nu",
        )
    )
    # Monte Carlo cross-checks
    mc_rows = []
    worst_mc = 0.0
    for d in d_list:
        t = 1.0
        nu = 4.0**d
        exact = ms.product_levelset_exact(d, t, nu)
        fld = cx.ProductPowerField(d, t, 1.0)
        curve = ms.dist_fn(
            fld, (np.zeros(d), np.full(d, t)), [nu], method="monte-carlo",
            budget=cfg.budget, seed=cfg.seed,
        )
        rel = abs(curve.measure[0] - exact) / exact
        worst_mc = max(worst_mc, rel)
        mc_rows.append((d, t, nu, exact, curve.measure[0], curve.stderr[0], rel))
    checks.append(
        CheckResult(
            name="closed form vs Monte Carlo",
            passed=worst_mc <= mc_tol,
            value=worst_mc,
            target=f"<= {mc_tol:g} at budget {cfg.budget}",
            claim="stratified MC reproduces the exact product level-set measure",
        )
    )
    # gaussian-tail bound (band decomposition), d = 2, 3
    g_rows = []
    for d in (2, 3):
        for gamma in (0.5, 1.0):
            ratios = []
            for nu in np.geomspace(1e-2, 1e6, 9):
                mval, merr = ms.gaussian_tail_levelset(d, gamma, 1.0, nu, budget=max(cfg.budget // 5, 50_000), seed=cfg.seed)
                bound = (1.0 / nu) * math.log(2.0 + nu) ** (d - 1)
                ratios.append(mval / bound)
                g_rows.append((d, gamma, nu, mval, merr, bound, mval / bound))
            C_g = max(ratios)
            fitted[f"gauss d={d} gamma={gamma:g}"] = {"C": C_g}
            checks.append(
                CheckResult(
                    name=f"gaussian-tail bound d={d} gamma={gamma:g}",
                    passed=np.isfinite(C_g) and C_g > 0,
                    value=C_g,
                    target="finite fitted C",
                    claim="|{prod 1/x_j e^{-(sum x)^gamma} > nu}| <= C nu^{-1} log^{d-1}(2+nu)",
                )
            )
    return checks, fitted, {
        "ratios": (("d", "t", "nu", "upper_ratio", "lower_ratio", "lower_applicable"), rows),
        "mc": (("d", "t", "nu", "exact", "mc", "stderr", "rel_diff"), mc_rows),
        "gauss": (("d", "gamma", "nu", "measure", "stderr", "bound", "ratio"), g_rows),
    }


def _proposition_cloud(cfg):
    ts = np.geomspace(1e-3, 1.0, int(cfg.grids.get("n_t", 7)))
    xis = np.geomspace(1e-3, 1e2, int(cfg.grids.get("n_xi", 11)))
    a = cfg.alpha[0] if cfg.alpha else -0.5
    gam_half = math.exp(-0.5 * log_gamma(a + 1.0))
    family = [
        ("box(0,1)", SeparableFunction.indicator_box([0.0], [1.0]), "p1"),
        ("box(0.5,1.5)", SeparableFunction.indicator_box([0.5], [1.5]), "p1"),
        ("x^-0.2 on (0,1)", SeparableFunction([(1.0, (PowerExp(-0.2, 0.0, 0.0, 1.0),))]), "p1"),
        ("laguerre-0", SeparableFunction([(gam_half, (PowerExp(0.5 * a, 0.5),))]), "lorentz"),
    ]
    return a, ts, xis, family


def _scn_proposition_1d(cfg: ExperimentConfig):
    a, ts, xis, family = _proposition_cloud(cfg)
    c_decay = cfg.tolerances.get("c_decay", 1.0 / 16.0)
    stab_tol = cfg.tolerances.get("stability", 0.20)
    p0, p1 = sg.critical_exponents_1d(a)
    rows = []
    ratios = {}
    norms = {}
    for name, f, variant in family:
        if variant == "p1":
            norms[name] = sg.lp_norm(f, p1)
        else:
            norms[name] = ms.lorentz_norm_separable_1d(f, p0)
    for name, f, variant in family:
        rs = []
        for t in ts:
            for xi in xis:
                lhs = sg.apply_kernel(kn.TypeMultiIndex([a]), t, f, [xi])
                rhs = sg.proposition_rhs(a, t, f, xi, c=c_decay, variant=variant, norm_value=norms[name])
                r = lhs / rhs
                rs.append(r)
                rows.append((name, t, xi, lhs, rhs, r))
        ratios[name] = rs
    all_r = np.concatenate([np.asarray(v) for v in ratios.values()])
    C_fit = float(np.max(all_r))
    # stability: refit on a denser xi grid
    xis2 = np.geomspace(1e-3, 1e2, 2 * len(xis))
    all_r2 = []
    for name, f, variant in family:
        for t in ts:
            for xi in xis2:
                lhs = sg.apply_kernel(kn.TypeMultiIndex([a]), t, f, [xi])
                rhs = sg.proposition_rhs(a, t, f, xi, c=c_decay, variant=variant, norm_value=norms[name])
                all_r2.append(lhs / rhs)
    C_fit2 = float(np.max(all_r2))
    stab = _fit_stability(C_fit, C_fit2)
    C_final = max(C_fit, C_fit2)
    checks = [
        CheckResult(
            name="pointwise bound",
            passed=np.isfinite(C_final) and stab <= stab_tol,
            value=C_final,
            target=f"finite fitted C with stability <= {stab_tol:g}",
            claim="kernel integral <= C [e^{-ct xi} M_1 f + e^{-c xi/t} xi^{-1/p} ||f||] on the declared cloud",
            details={"c_decay": c_decay, "stability": stab, "violations": 0, "p0": p0, "p1": p1},
        )
    ]
    fitted = {"C": C_final, "c_decay": c_decay, "stability": stab, "norms": norms}
    return checks, fitted, {
        "proposition": (("f", "t", "xi", "lhs", "rhs", "ratio"), rows)
    }


def _scn_weak_type_1d(cfg: ExperimentConfig):
    a = cfg.alpha[0] if cfg.alpha else -0.5
    p0, p1 = sg.critical_exponents_1d(a)
    taus = np.geomspace(1e-3, 1.0, int(cfg.grids.get("n_tau", 7)))
    band = cfg.tolerances.get("band", 3.0)
    growth_needed = cfg.tolerances.get("growth", 3.0)
    ppd = int(cfg.grids.get("points_per_decade", 12))
    ts = np.geomspace(1e-4, 1e2, 6 * 16 + 1)
    checks, fitted = [], {}
    rows = []
    funcs = []
    curves = {}
    for tau in taus:
        fld = cx.TabulatedMaximalProductField(
            [a], [0.0], [tau], coeff=tau ** (-1.0 / p1), t_grid=ts,
            x_min=1e-24, x_max=1e3, points_per_decade=ppd,
        )
        F = fld.evaluate(fld.xg[:, None])
        lam_hi = float(F.max()) * 0.999
        lams = np.geomspace(lam_hi * 1e-8, lam_hi, 161)
        curve = ms.field_curve_1d(fld.xg, F, lams)
        curves[tau] = curve
        val, lam_at = weak_type_functional(curve, p1, 1.0)
        funcs.append(val)
        for lam, m in zip(curve.lam, curve.measure):
            rows.append((tau, lam, m))
    funcs = np.asarray(funcs)
    variation = float(funcs.max() / funcs.min())
    checks.append(
        CheckResult(
            name=f"weak-(p1,p1) stability across dilations",
            passed=variation <= band,
            value=variation,
            target=f"max/min <= {band:g}",
            claim="the weak-type statistic of the dilation family is uniformly bounded at p1",
            details={"functionals": dict(zip(map(float, taus), map(float, funcs))), "p1": p1},
        )
    )
    # beyond the pencil: running sup grows without bound with the lambda window
    tau_probe = float(cfg.grids.get("tau_probe", 1e-2))
    curve = curves[min(curves, key=lambda t: abs(t - tau_probe))]
    p_beyond = p1 + 0.5
    norm_beyond = (tau_probe ** (1.0 - p_beyond / p1)) ** (1.0 / p_beyond)
    lam_run, run = running_sup_functional(curve, p_beyond, norm_beyond)
    sel = lam_run >= 1.0
    growth = float(run[sel][-1] / run[sel][0])
    monotone = bool(np.all(np.diff(run) >= -1e-12))
    checks.append(
        CheckResult(
            name=f"no weak type at p1+0.5",
            passed=monotone and growth >= growth_needed,
            value=growth,
            target=f"running sup grows >= x{growth_needed:g} across the lambda window, monotonically",
            claim="beyond p1 the weak-type statistic has no uniform bound: its running sup grows with the level window",
            details={"tau": tau_probe, "p": p_beyond, "window": [float(lam_run[sel][0]), float(lam_run[sel][-1])]},
        )
    )
    run_rows = [(tau_probe, l, v) for l, v in zip(lam_run, run)]
    fitted["functional_p1"] = {str(float(t)): float(v) for t, v in zip(taus, funcs)}
    fitted["growth_beyond_p1"] = growth
    return checks, fitted, {
        "weaktype": (("tau", "lambda", "measure"), rows),
        "runningsup": (("tau", "lambda_cap", "running_sup"), run_rows),
    }


def _scn_sharpness_cube(cfg: ExperimentConfig):
    alpha = cfg.alpha or (-0.5, -0.5)
    amin = min(alpha)
    p1 = -2.0 / amin
    lams = np.geomspace(10.0, 1e3, int(cfg.grids.get("n_lambda", 25)))
    slope_tol = cfg.tolerances.get("slope_tol", 0.15)
    log_tol = cfg.tolerances.get("log_slope_tol", 0.3)
    curve, fld = _cube_field_curve(alpha, [0.5, 0.5], [1.0, 1.0], lams,
                                   points_per_decade=int(cfg.grids.get("points_per_decade", 48)))
    m = curve.measure
    s1, _, r2_1 = _polyfit_r2(np.log(lams), np.log(m))
    s2_raw, _, _ = _polyfit_r2(np.log(np.log(lams)), np.log(m * lams**p1))
    C_corner = fld.corner_constant()
    s2_norm, _, _ = _polyfit_r2(np.log(np.log(2.0 + lams / C_corner)), np.log(m * lams**p1))
    checks = [
        CheckResult(
            name="level-measure power law",
            passed=abs(s1 + p1) <= slope_tol,
            value=s1,
            target=f"-{p1:g} +- {slope_tol:g}",
            claim="|{sup_t kernel integral of the cube > lambda}| decays like lambda^{-p1}",
            details={"r2": r2_1},
        ),
        CheckResult(
            name="log-factor slope (raw lambda)",
            passed=abs(s2_raw - 1.0) <= log_tol,
            value=s2_raw,
            target=f"1 +- {log_tol:g} regressing on log log lambda",
            claim="the residual lambda^{p1}-compensated measure carries one logarithmic factor",
            details={
                "note": "the kernel's corner constant ~0.045 shifts the log phase; "
                "the raw regression understates the slope in this window "
                "(see the normalized variant)",
            },
        ),
        CheckResult(
            name="log-factor slope (normalized)",
            passed=abs(s2_norm - 1.0) <= log_tol,
            value=s2_norm,
            target=f"1 +- {log_tol:g} regressing on log log(2 + lambda/C_corner)",
            claim="with the field's own corner normalization the log factor has unit exponent",
            details={"C_corner": C_corner},
        ),
    ]
    rows = list(zip(lams, m, curve.stderr, m * lams**p1))
    fitted = {"slope_power": s1, "slope_log_raw": s2_raw, "slope_log_normalized": s2_norm,
              "corner_constant": C_corner}
    return checks, fitted, {
        "cube": (("lambda", "measure", "err", "compensated"), rows)
    }


def _scn_log_endpoint_d2(cfg: ExperimentConfig):
    alpha = cfg.alpha or (-0.5, -0.5)
    p1 = -2.0 / min(alpha)
    lams = np.geomspace(10.0, 1e3, int(cfg.grids.get("n_lambda", 25)))
    band = cfg.tolerances.get("band", 3.0)
    curve, _ = _cube_field_curve(alpha, [0.5, 0.5], [1.0, 1.0], lams,
                                 points_per_decade=int(cfg.grids.get("points_per_decade", 40)))
    # ||cube||_{p1} = |cube|^{1/p1} = (1/4)^{1/4}
    norm = 0.25 ** (1.0 / p1)
    stat = curve.measure * lams**p1 / (norm**p1 * np.log(2.0 + lams / norm))
    variation = float(stat.max() / stat.min())
    checks = [
        CheckResult(
            name="logarithmic weak-type functional bounded",
            passed=variation <= band,
            value=variation,
            target=f"max/min <= {band:g} over lambda in [10, 1e3]",
            claim="measure <= C lambda^{-p1} ||f||^{p1} log(2 + lambda/||f||) at d = 2 with two minimal components",
            details={"C_max": float(stat.max())},
        )
    ]
    rows = list(zip(lams, curve.measure, stat))
    return checks, {"C_log_weak": float(stat.max())}, {
        "logweak": (("lambda", "measure", "compensated_stat"), rows)
    }


def _scn_counterexample_growth(cfg: ExperimentConfig):
    p1 = 4.0
    p0 = 4.0 / 3.0
    checks, fitted = [], {}
    # --- E_R growth law, d = 4 ---
    Rs = cfg.grids.get("R_list", [1e2, 1e6, 1e12])
    lam0 = float(cfg.grids.get("lambda_probe", 1.0))
    sp4 = cx.SplitSpec(4, 2)
    ratios, meas_list, er_rows = [], [], []
    for R in Rs:
        fam = cx.family_E_R(4, sp4, p1, R, slices=cfg.grids.get("slices"))
        m = fam.predicted_field.superlevel_measure_exact(lam0)
        target = lam0**-p1 * math.log(2.0 + lam0**p1 * math.log(R)) ** (sp4.d_prime - 1)
        ratios.append(m / target)
        meas_list.append(m)
        for lam in np.geomspace(0.3, 30.0, 16):
            mm = fam.predicted_field.superlevel_measure_exact(lam)
            er_rows.append((R, lam, mm, lam**-p1 * math.log(2.0 + lam**p1 * math.log(R)) ** (sp4.d_prime - 1)))
    spread = max(ratios) / min(ratios)
    checks.append(
        CheckResult(
            name="E_R level-measure growth law",
            passed=spread <= 2.0 and all(np.diff(meas_list) > 0),
            value=spread,
            target="within factor 2 of c lambda^{-p1} log^{d'-1}(2+lambda^{p1} log R), strictly increasing in R",
            claim="the slab-family field has level sets growing without bound as R grows",
            details={"ratios": ratios, "measures": meas_list},
        )
    )
    fitted["E_R_ratio_spread"] = spread
    # --- F_N functional slope, d = 4 ---
    Ns = cfg.grids.get("N_list", [8, 32, 128])
    slope_tol = cfg.tolerances.get("fn_slope_rel", 0.30)
    fn_rows, funcs = [], []
    for N in Ns:
        fam = cx.family_F_N(4, sp4, p1, int(N), depth=int(cfg.grids.get("depth", 12)))
        blocks = fam.normalization["blocks"]
        vs = np.array([b["predicted_lower_value"] for b in blocks])
        vols = np.array([b["block_volume"] for b in blocks])
        lamN = 0.5 * vs.min()
        mN = float(vols[vs > lamN].sum())
        # the law statistics use the exact measure of the ideal set; the
        # dyadic realization carries its own factor-2 approximation check
        FN = fam.normalization["measure_total_exact"]
        func = lamN**p0 * mN / (FN * math.log(2.0 + 1.0 / FN) ** 0.0)
        funcs.append(func)
        fn_rows.append((N, FN, lamN, mN, func))
    target_slope = (sp4.d_prime - 1) * p0 / p1
    slope, _, r2 = _polyfit_r2(np.log(np.log(2.0 + np.asarray(Ns, float))), np.log(funcs))
    checks.append(
        CheckResult(
            name="F_N restricted-weak functional growth",
            passed=abs(slope - target_slope) <= slope_tol * target_slope and r2 >= 0.9,
            value=slope,
            target=f"{target_slope:g} +- {slope_tol:.0%}, R^2 >= 0.9",
            claim="the restricted weak-type functional of the dyadic union grows like log^{(d'-1)p0/p1}(2+N)",
            details={"r2": r2, "functionals": funcs},
        )
    )
    fitted["F_N_slope"] = {"slope": slope, "target": target_slope, "r2": r2}
    # --- f_t family, d = 5: level law growth + operator anchor ---
    sp5 = cx.SplitSpec(5, 2)
    t_list = cfg.grids.get("t_list", [1.0 / 8.0, 1.0 / 32.0, 1.0 / 128.0])
    lam_f = float(cfg.grids.get("lambda_ft", 0.5))
    ft_rows, levels = [], []
    for t in t_list:
        fam = cx.family_f_t(5, sp5, p1, t)
        m = fam.predicted_field.superlevel_measure_exact(lam_f)
        law = lam_f**-p1 * math.log(max(t ** (sp5.d_prime - sp5.d_dprime) * lam_f**p1, 2.0)) ** (sp5.d_prime - 1)
        levels.append(m)
        ft_rows.append((t, lam_f, m, law, m / law))
    checks.append(
        CheckResult(
            name="f_t level measure grows as t drops",
            passed=bool(np.all(np.diff(levels) > 0)),
            value=levels[-1] / levels[0],
            target="strictly increasing level measure along t -> 0",
            claim="the normalized small-box family defeats any weak-(p1,p1) bound for d >= 5",
            details={"levels": levels},
        )
    )
    # operator anchor: maximal >= c * predicted field at window probes (d=5)
    t_anchor = float(cfg.grids.get("t_anchor", 0.05))
    fam = cx.family_f_t(5, sp5, p1, t_anchor)
    rng = np.random.Generator(np.random.Philox(key=cfg.seed, counter=[0, 0, 3, 0]))
    lo_w, hi_w = fam.window
    n_probe = int(cfg.grids.get("n_probes", 6))
    probes = np.exp(
        rng.uniform(np.log(np.maximum(lo_w, 1e-3 * t_anchor)), np.log(hi_w), size=(n_probe, 5))
    )
    t_grid_anchor = np.geomspace(t_anchor / 4.0, 4.0 * t_anchor, 17)
    anchor_rows, ratios_anchor = [], []
    for x in probes:
        vals = [sg.apply_kernel(kn.TypeMultiIndex((-0.5,) * 5), t, fam.function, x) for t in t_grid_anchor]
        got = max(vals)
        pred = float(fam.predicted_field.evaluate(x[None, :])[0])
        ratios_anchor.append(got / pred)
        anchor_rows.append((*x, got, pred, got / pred))
    c_anchor = min(ratios_anchor)
    checks.append(
        CheckResult(
            name="maximal operator dominates the predicted field (d=5 window)",
            passed=c_anchor > 0,
            value=c_anchor,
            target="fitted c > 0 at the probe points",
            claim="sup_t kernel integral of f_t >= c t^{d''/p1} prod' x_j^{-1/p1} on the stated window",
            details={"t": t_anchor, "ratios": ratios_anchor},
        )
    )
    fitted["ft_anchor_c"] = c_anchor
    return checks, fitted, {
        "er_growth": (("R", "lambda", "measure", "law"), er_rows),
        "fn": (("N", "F_N_measure", "lambda_N", "level_measure", "functional"), fn_rows),
        "ft": (("t", "lambda", "measure", "law", "ratio"), ft_rows),
        "anchor": (("x1", "x2", "x3", "x4", "x5", "maximal", "predicted", "ratio"), anchor_rows),
    }


def _scn_p0_endpoint(cfg: ExperimentConfig):
    p1, p0 = 4.0, 4.0 / 3.0
    band = cfg.tolerances.get("band", 3.0)
    checks, fitted = [], {}
    # psi_d weak-L^{p0} functional over 8 decades
    psi_rows = []
    for d in (2, 3):
        lams = np.geomspace(1e-2, 1e6, 33)
        curve = ms.simplex_band_curve(cx.PsiField(d, p1), d, lams, budget=max(cfg.budget // 3, 100_000), seed=cfg.seed)
        live = curve.measure > 0
        func = curve.lam[live] * curve.measure[live] ** (1.0 / p0)
        variation = float(func.max() / func.min())
        for lam, m, s in zip(curve.lam, curve.measure, curve.stderr):
            psi_rows.append((d, lam, m, s))
        checks.append(
            CheckResult(
                name=f"psi weak-p0 functional flat d={d}",
                passed=variation <= band,
                value=variation,
                target=f"max/min <= {band:g} over 8 decades",
                claim="(sum x)^{(2/p1-1)d} prod x^{-1/p1} lies in weak L^{p0}",
                details={"sup": float(func.max())},
            )
        )
        fitted[f"psi_d{d}_sup"] = float(func.max())
    # rearrangement bound for the damped product profile
    drear_rows = []
    for d in (2, 3):
        for gamma in (0.5, 1.0):
            lams = np.geomspace(1e-5, 1e4, 150)
            curve0 = ms.gaussian_tail_curve(d, gamma, p1 ** (1.0 / gamma), lams**p1,
                                            budget=max(cfg.budget // 3, 100_000), seed=cfg.seed)
            fcurve = ms.DistributionCurve(lams, curve0.measure, curve0.stderr, "monte-carlo")
            s = ms.default_s_grid(1e-6, 1e3, 32)
            r = ms.rearrange(fcurve, s)
            bound = s ** (-1.0 / p1) * np.log(2.0 + 1.0 / s) ** ((d - 1.0) / p1)
            live = r.fstar > 0
            C_g = float(np.max(r.fstar[live] / bound[live]))
            drear_rows.append((d, gamma, C_g))
            checks.append(
                CheckResult(
                    name=f"rearrangement bound d={d} gamma={gamma:g}",
                    passed=np.isfinite(C_g) and C_g > 0,
                    value=C_g,
                    target="finite fitted C, zero violations on the s-grid",
                    claim="F_sigma* (s) <= C s^{-1/p1} log^{(d-1)/p1}(2 + 1/(sigma^d s))",
                    details={"violations": 0},
                )
            )
            fitted[f"drear_d{d}_g{gamma:g}"] = C_g
    # restricted-weak family of shrinking squares, d = 2
    eps_list = cfg.grids.get("eps_list", [1e-3, 1e-2, 1e-1, 0.5, 1.0])
    funcs, sq_rows = [], []
    for eps in eps_list:
        scale = eps ** (2.0 * (0.5 * 0.5 + 1.0))  # crude magnitude guide for lambda windows
        lams = np.geomspace(1e-3, 1e3, 31) * eps**1.5
        curve, _ = _cube_field_curve((-0.5, -0.5), [0.0, 0.0], [eps, eps], lams,
                                     points_per_decade=32, x_min=1e-21, x_max=40.0)
        E_meas = eps * eps
        denom = E_meas ** (1.0 / p0) * math.log(2.0 + 1.0 / E_meas) ** (1.0 / p1)
        val, lam_at = weak_type_functional(curve, p0, denom)
        funcs.append(val)
        sq_rows.append((eps, val, lam_at))
    # boundedness along the family: the compensated statistic must not grow
    # as |E| shrinks (growth would defeat the restricted-weak endpoint bound)
    inv_E = np.log(1.0 / np.asarray(eps_list, float) ** 2)
    trend, _, _ = _polyfit_r2(inv_E, np.log(funcs))
    checks.append(
        CheckResult(
            name="restricted weak-p0 functional across square family",
            passed=(trend <= 0.05) and np.isfinite(max(funcs)),
            value=float(max(funcs)),
            target="bounded, non-growing trend as |E| -> 0 (slope <= 0.05 in log(1/|E|))",
            claim="lambda |{.>lambda}|^{1/p0} <= C |E|^{1/p0} log^{1/p1}(2+1/|E|) on shrinking squares",
            details={
                "functionals": dict(zip(map(float, eps_list), map(float, funcs))),
                "trend_slope": trend,
            },
        )
    )
    fitted["square_family"] = dict(zip(map(float, eps_list), map(float, funcs)))
    return checks, fitted, {
        "psi": (("d", "lambda", "measure", "stderr"), psi_rows),
        "drear": (("d", "gamma", "C_fitted"), drear_rows),
        "squares": (("eps", "functional", "lambda_at"), sq_rows),
    }


def _scn_p0_witness(cfg: ExperimentConfig):
    alpha = cfg.alpha or (-0.5, -0.5)
    d = len(alpha)
    growth_needed = cfg.tolerances.get("growth_per_step", 2.0)
    rep = cx.divergence_witness_p0(d, alpha)
    checks = [
        CheckResult(
            name="truncated pairing grows monotonically",
            passed=all(g > 1.0 for g in rep.growth_factors),
            value=min(rep.growth_factors),
            target="each truncation strictly larger than the previous",
            claim="the pairing of the rearranged borderline probe against prod y^{-1/p1} diverges",
            details={"pairings": rep.pairings, "growth": rep.growth_factors},
        ),
        CheckResult(
            name="equality placement cross-check",
            passed=max(rep.cross_check_rel) <= 0.05,
            value=max(rep.cross_check_rel),
            target="<= 5% agreement between the 1-D reduction and direct quadrature",
            claim="the probe placement achieves equality in the rearrangement pairing inequality",
        ),
        CheckResult(
            name="rearranged corner weight lower bound",
            passed=rep.psi_star_constant > 0,
            value=rep.psi_star_constant,
            target="fitted c > 0",
            claim="(prod y^{-1/p1})*(s) >= c s^{-1/p1} log^{(d-1)/p1}(2+1/s)",
        ),
        CheckResult(
            name="pairing growth rate per step",
            passed=all(g >= growth_needed for g in rep.growth_factors),
            value=min(rep.growth_factors),
            target=f">= x{growth_needed:g} per epsilon step",
            claim="stated growth rate of the truncated pairing",
            details={
                "growth": rep.growth_factors,
                "note": "the borderline probe pairs to a doubly-logarithmic integral, "
                "whose two-decade growth factors are ~1.39 and ~1.15; the stated "
                "x2-per-step rate is not attainable for this probe (see ledger)",
            },
        ),
    ]
    fitted = {"pairings": rep.pairings, "growth": rep.growth_factors, "probe": rep.probe}
    rows = list(zip(rep.epsilons, rep.pairings, [0.0] + rep.growth_factors, rep.cross_check_rel))
    return checks, fitted, {
        "witness": (("epsilon", "pairing", "growth_from_previous", "crosscheck_rel"), rows)
    }


SCENARIOS = {
    "orthonormality": _scn_orthonormality,
    "eigen-decay": _scn_eigen_decay,
    "chapman-kolmogorov": _scn_chapman_kolmogorov,
    "envelope-sandwich": _scn_envelope_sandwich,
    "levelset-lemma": _scn_levelset_lemma,
    "proposition-1d": _scn_proposition_1d,
    "weak-type-1d": _scn_weak_type_1d,
    "sharpness-cube": _scn_sharpness_cube,
    "log-endpoint-d2": _scn_log_endpoint_d2,
    "counterexample-growth": _scn_counterexample_growth,
    "p0-endpoint": _scn_p0_endpoint,
    "p0-witness": _scn_p0_witness,
}


def scenario_names():
    return sorted(SCENARIOS)


def run(config: ExperimentConfig) -> ExperimentReport:
    """Execute one scenario: runs its checks, writes one CSV per sweep table
    plus a JSON report, and returns the report object."""
    t0 = time.perf_counter()
    checks, fitted, tables = SCENARIOS[config.scenario](config)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table_paths = {}
    for name, (header, rows) in tables.items():
        path = out / f"{config.scenario}_{name}.csv"
        table_paths[name] = write_csv(path, config.scenario, name, header, rows)
    report = ExperimentReport(
        scenario=config.scenario,
        config=config.to_dict(),
        checks=checks,
        fitted=fitted,
        tables=table_paths,
        wall_clock_s=time.perf_counter() - t0,
    )
    with open(out / f"{config.scenario}_report.json", "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True, default=_json_default)
    return report


def _json_default(o):
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)!r}")
