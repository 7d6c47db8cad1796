"""Command-line interface: kernel evaluations, operator applications,
distribution/rearrangement/norm utilities, level sets, the classification
table, counterexample generators, and the scenario runner.

Single evaluations print CSV to stdout; scenario runs write CSV + JSON
reports into --out and exit nonzero when any check fails.
"""

from __future__ import annotations

import json
import math
import re
import subprocess
import sys

import click
import numpy as np

from . import constructions as cx
from . import experiments as ex
from . import kernel as kn
from . import measure as ms
from . import pencil as pc
from . import semigroup as sg
from .functions import Box, PowerExp, SeparableFunction


def _parse_floats(text):
    return [float(v) for v in re.split(r"[,\s]+", text.strip()) if v]


_PIECE_RE = re.compile(r"(box|powexp)\(([^)]*)\)")


def parse_function_spec(spec: str, d: int | None = None) -> SeparableFunction:
    """Mini-grammar for separable functions.

    terms separated by '+'; a term is '[coef*]piece x piece x ...' with
    pieces box(lo,hi) and powexp(p,q[,lo,hi]).  Example:
    "0.5*box(0.5,1)xbox(0.5,1) + powexp(-0.25,0.5)xbox(0,1)".
    """
    terms = []
    for term in spec.split("+"):
        term = term.strip()
        if not term:
            continue
        coef = 1.0
        if "*" in term.split("(")[0]:
            head, term = term.split("*", 1)
            coef = float(head)
        pieces = []
        for m in _PIECE_RE.finditer(term):
            kind, args = m.group(1), _parse_floats(m.group(2))
            if kind == "box":
                pieces.append(Box(*args))
            else:
                pieces.append(PowerExp(*args))
        if not pieces:
            raise click.BadParameter(f"could not parse term {term!r}")
        terms.append((coef, tuple(pieces)))
    f = SeparableFunction(terms)
    if d is not None and f.d != d:
        raise click.BadParameter(f"function has dimension {f.d}, expected {d}")
    return f


def _emit_csv(header, rows):
    click.echo(",".join(header))
    for row in rows:
        click.echo(",".join(repr(float(v)) if isinstance(v, (float, np.floating)) else str(v) for v in row))


@click.group()
def main():
    """Laguerre heat-kernel laboratory."""


@main.command("kernel")
@click.option("--alpha", required=True, help="comma-separated type vector")
@click.option("--t", "t", required=True, type=float)
@click.option("--xi", required=True, help="comma-separated point")
@click.option("--eta", required=True, help="comma-separated point")
@click.option("--envelope", type=click.Choice(["none", "upper", "lower-a", "lower-b"]), default="none")
def kernel_cmd(alpha, t, xi, eta, envelope):
    """Evaluate the product kernel (and optionally an envelope) at one point."""
    al = kn.TypeMultiIndex(_parse_floats(alpha))
    x = _parse_floats(xi)
    y = _parse_floats(eta)
    value = kn.h_product(al, t, x, y)
    row = list(x) + list(y) + [t, value]
    header = [f"xi{i+1}" for i in range(al.d)] + [f"eta{i+1}" for i in range(al.d)] + ["t", "kernel"]
    if envelope != "none":
        if al.d != 1:
            raise click.BadParameter("envelopes are one-dimensional")
        p = kn.KernelParams1D(al.alpha[0], t)
        if envelope == "upper":
            env = kn.upper_envelope(p, x[0], y[0])
        elif envelope == "lower-a":
            env = kn.lower_bound_a(p, x[0], y[0])
        else:
            env = kn.lower_bound_b(p, x[0], y[0])
        header.append(envelope)
        row.append(float("nan") if env is None else env)
    _emit_csv(header, [row])


@main.command("apply")
@click.option("--alpha", required=True)
@click.option("--f", "fspec", required=True, help="separable function spec")
@click.option("--x", required=True)
@click.option("--t", "ts", required=True, help="one or more times, comma-separated")
@click.option("--semigroup", is_flag=True, help="apply the semigroup instead of the raw kernel integral")
def apply_cmd(alpha, fspec, x, ts, semigroup):
    """Kernel integral (or semigroup) of f at a point, one row per time."""
    al = kn.TypeMultiIndex(_parse_floats(alpha))
    f = parse_function_spec(fspec, al.d)
    pt = _parse_floats(x)
    rows = []
    for t in _parse_floats(ts):
        v = sg.apply_semigroup(al, t, f, pt) if semigroup else sg.apply_kernel(al, t, f, pt)
        rows.append(list(pt) + [t, v])
    _emit_csv([f"x{i+1}" for i in range(al.d)] + ["t", "value"], rows)


@main.command("maximal")
@click.option("--alpha", required=True)
@click.option("--f", "fspec", required=True)
@click.option("--x", required=True, help="one point, or several separated by ';'")
@click.option("--t-min", type=float, default=1e-4, show_default=True)
@click.option("--t-max", type=float, default=1e2, show_default=True)
@click.option("--points-per-decade", type=int, default=32, show_default=True)
@click.option("--refinement", type=int, default=3, show_default=True)
def maximal_cmd(alpha, fspec, x, t_min, t_max, points_per_decade, refinement):
    """sup over t of the kernel integral of |f|."""
    al = kn.TypeMultiIndex(_parse_floats(alpha))
    f = parse_function_spec(fspec, al.d)
    grid = sg.TimeGrid(t_min, t_max, points_per_decade, refinement)
    rows = []
    for chunk in x.split(";"):
        pt = _parse_floats(chunk)
        res = sg.maximal(al, f, pt, grid)
        rows.append(list(pt) + [res.value, res.argmax_t])
    _emit_csv([f"x{i+1}" for i in range(al.d)] + ["value", "argmax_t"], rows)


def _build_field(field: str):
    kind, _, args = field.partition(":")
    kv = dict(p.split("=") for p in args.split(",") if p)
    kv = {k: float(v) for k, v in kv.items()}
    if kind == "prodpow":
        return cx.ProductPowerField(int(kv["d"]), kv.get("t", 1.0), kv["beta"], kv.get("coeff", 1.0)), int(kv["d"])
    if kind == "psi":
        return cx.PsiField(int(kv["d"]), kv["p1"]), int(kv["d"])
    if kind == "fsigma":
        return cx.FSigmaField(int(kv["d"]), kv["p1"], kv["gamma"], kv.get("sigma", 1.0)), int(kv["d"])
    raise click.BadParameter(f"unknown field {kind!r}; use prodpow:, psi: or fsigma:")


@main.command("distfn")
@click.option("--field", required=True, help="prodpow:d=..,t=..,beta=.. | psi:d=..,p1=.. | fsigma:d=..,p1=..,gamma=..")
@click.option("--lam-min", type=float, default=1e-2, show_default=True)
@click.option("--lam-max", type=float, default=1e6, show_default=True)
@click.option("--per-decade", type=int, default=8, show_default=True)
@click.option("--method", type=click.Choice(["auto", "closed-form", "monte-carlo", "grid"]), default="auto")
@click.option("--domain", default=None, help="lo1,hi1;lo2,hi2;... (defaults to the field's natural domain)")
@click.option("--budget", type=int, default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None, help="CSV path (stdout when omitted)")
def distfn_cmd(field, lam_min, lam_max, per_decade, method, domain, budget, seed, out):
    """Superlevel-set measures lambda -> |{F > lambda}|."""
    fld, d = _build_field(field)
    lams = ms.default_lambda_grid(lam_min, lam_max, per_decade)
    if isinstance(fld, (cx.PsiField, cx.FSigmaField)):
        if isinstance(fld, cx.PsiField):
            curve = ms.simplex_band_curve(fld, d, lams, budget=budget, seed=seed)
        else:
            nus = lams**fld.p1
            c0 = ms.gaussian_tail_curve(d, fld.gamma, fld.sigma * fld.p1 ** (1.0 / fld.gamma), nus, budget=budget, seed=seed)
            curve = ms.DistributionCurve(lams, c0.measure, c0.stderr, "monte-carlo")
    else:
        if domain:
            parts = [tuple(_parse_floats(p)) for p in domain.split(";")]
            dom = (np.array([p[0] for p in parts]), np.array([p[1] for p in parts]))
        else:
            dom = (np.zeros(d), np.full(d, fld.t))
        curve = ms.dist_fn(fld, dom, lams, method=method, budget=budget, seed=seed)
    rows = list(zip(curve.lam, curve.measure, curve.stderr))
    header = ("lambda", "measure", "stderr")
    if out:
        path = ex.write_csv(out, "distfn", "curve", header, rows)
        click.echo(json.dumps({"csv": path, "method": curve.method, "seed": seed, "budget": budget}))
    else:
        _emit_csv(header, rows)


@main.command("rearrange")
@click.option("--curve", "curve_csv", required=True, help="CSV from distfn (lambda,measure,stderr)")
@click.option("--s-min", type=float, default=1e-10, show_default=True)
@click.option("--s-max", type=float, default=1e4, show_default=True)
@click.option("--per-decade", type=int, default=64, show_default=True)
def rearrange_cmd(curve_csv, s_min, s_max, per_decade):
    """Decreasing rearrangement of a distribution curve."""
    lam, mvals, err = _read_curve(curve_csv)
    curve = ms.DistributionCurve(lam, mvals, err, "file")
    r = ms.rearrange(curve, ms.default_s_grid(s_min, s_max, per_decade))
    _emit_csv(("s", "fstar"), list(zip(r.s, r.fstar)))


def _read_curve(path):
    lam, m, e = [], [], []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("lambda"):
                continue
            parts = line.strip().split(",")
            if len(parts) >= 2:
                lam.append(float(parts[0]))
                m.append(float(parts[1]))
                e.append(float(parts[2]) if len(parts) > 2 else 0.0)
    return np.array(lam), np.array(m), np.array(e)


@main.command("norms")
@click.option("--curve", "curve_csv", required=True, help="CSV from distfn")
@click.option("--p", type=float, required=True)
@click.option("--npow", type=float, default=0.0, show_default=True, help="log exponent of the Lorentz-Zygmund weight")
@click.option("--kind", type=click.Choice(["lorentz", "lorentz-zygmund", "weak-orlicz"]), default="lorentz")
def norms_cmd(curve_csv, p, npow, kind):
    """Quasinorms computed from a distribution curve."""
    lam, mvals, err = _read_curve(curve_csv)
    curve = ms.DistributionCurve(lam, mvals, err, "file")
    if kind == "weak-orlicz":
        value = ms.weak_orlicz_quasinorm(p, npow, curve)
    else:
        r = ms.rearrange(curve)
        value = ms.lorentz_p1_norm(p, r) if kind == "lorentz" else ms.lorentz_zygmund_norm(p, npow, r)
    click.echo(json.dumps({"kind": kind, "p": p, "npow": npow, "value": value}))


@main.command("levelset")
@click.option("--d", type=int, required=True)
@click.option("--t", type=float, default=1.0, show_default=True)
@click.option("--nu", type=float, required=True)
@click.option("--gamma", type=float, default=None, help="use the damped-product level set instead")
@click.option("--sigma", type=float, default=1.0, show_default=True)
@click.option("--budget", type=int, default=400_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def levelset_cmd(d, t, nu, gamma, sigma, budget, seed):
    """Product level-set measures: exact closed form, bound ratios, or the
    damped-product Monte Carlo estimate (--gamma)."""
    if gamma is None:
        exact = ms.product_levelset_exact(d, t, nu)
        up, low, ok = ms.levelset_bound_check(d, t, nu)
        click.echo(json.dumps({
            "d": d, "t": t, "nu": nu, "measure": exact,
            "upper_ratio": up, "lower_ratio": low, "lower_applicable": ok,
            "method": "closed-form",
        }))
    else:
        mval, merr = ms.gaussian_tail_levelset(d, gamma, sigma, nu, budget=budget, seed=seed)
        click.echo(json.dumps({
            "d": d, "gamma": gamma, "sigma": sigma, "nu": nu,
            "measure": mval, "stderr": merr, "method": "monte-carlo",
            "seed": seed, "budget": budget,
        }))


@main.command("pencil")
@click.option("--alpha", default=None)
@click.option("--p", type=float, default=None)
@click.option("--endpoint", type=click.Choice(["p0-endpoint", "p1-endpoint"]), default=None)
@click.option("--min-tol", type=float, default=0.0, show_default=True,
              help="treat near-minimal components as minimal")
@click.option("--sweep", is_flag=True, help="emit the (alpha, 1/p) region CSV instead")
@click.option("--out", default=None)
def pencil_cmd(alpha, p, endpoint, min_tol, sweep, out):
    """Boundedness classification at (alpha, p), or the region sweep CSV."""
    if sweep:
        rows = [(r["alpha"], r["p"], r["inv_p"], r["regime"]) for r in pc.pencil_sweep()]
        header = ("alpha", "p", "inv_p", "regime")
        if out:
            path = ex.write_csv(out, "pencil", "sweep", header, rows)
            click.echo(json.dumps({"csv": path, "rows": len(rows)}))
        else:
            _emit_csv(header, rows)
        return
    if alpha is None:
        raise click.BadParameter("--alpha is required without --sweep")
    verdict = pc.classify(_parse_floats(alpha), p=p, endpoint=endpoint, min_tol=min_tol)
    click.echo(json.dumps({
        "regime": verdict.regime.value, "N": verdict.N,
        "p0": verdict.p0, "p1": verdict.p1, "note": verdict.note,
    }))


@main.command("counterexample")
@click.option("--kind", type=click.Choice(["ft", "ER", "Etbeta", "FN", "cube", "p0witness"]), required=True)
@click.option("--params", default="", help="k=v comma list, e.g. d=5,dprime=2,t=0.05")
@click.option("--depth", type=int, default=12, show_default=True)
@click.option("--probes", type=int, default=6, show_default=True)
@click.option("--out", default=None)
def counterexample_cmd(kind, params, depth, probes, out):
    """Generate one counterexample family and report its normalization."""
    kv = dict(pair.split("=") for pair in params.split(",") if pair)
    kv = {k: float(v) for k, v in kv.items()}
    p1 = kv.get("p1", 4.0)
    if kind == "cube":
        d = int(kv.get("d", 2))
        fam = cx.sharpness_cube(d, [-2.0 / p1] * d)
    elif kind == "ft":
        d = int(kv.get("d", 5))
        fam = cx.family_f_t(d, cx.SplitSpec(d, int(kv.get("dprime", 2))), p1, kv.get("t", 0.05))
    elif kind == "ER":
        d = int(kv.get("d", 4))
        fam = cx.family_E_R(d, cx.SplitSpec(d, d // 2), p1, kv.get("R", 1e4))
    elif kind == "Etbeta":
        d = int(kv.get("d", 5))
        t = kv.get("t", 0.1)
        dp = int(kv.get("dprime", 2))
        beta = kv.get("beta", 2.0 * t ** (-dp / p1))
        fam = cx.family_E_t_beta(d, cx.SplitSpec(d, dp), p1, t, beta, depth)
    elif kind == "FN":
        d = int(kv.get("d", 4))
        fam = cx.family_F_N(d, cx.SplitSpec(d, d // 2), p1, int(kv.get("N", 16)), depth)
    else:
        d = int(kv.get("d", 2))
        rep = cx.divergence_witness_p0(d, [-2.0 / p1] * d)
        click.echo(json.dumps({
            "kind": "p0witness", "epsilons": rep.epsilons, "pairings": rep.pairings,
            "growth_factors": rep.growth_factors, "crosscheck_rel": rep.cross_check_rel,
            "probe": rep.probe, "psi_star_constant": rep.psi_star_constant,
        }))
        return
    summary = {"kind": fam.kind, "params": fam.params, "normalization": fam.normalization}
    click.echo(json.dumps(summary, default=ex._json_default))


@main.command("verify")
@click.argument("scenario")
@click.option("--config", "config_path", default=None, help="JSON config file")
@click.option("--seed", type=int, default=None)
@click.option("--budget", type=int, default=None)
@click.option("--out", default="reports", show_default=True)
def verify_cmd(scenario, config_path, seed, budget, out):
    """Run one verification scenario; exit 0 iff every check passes."""
    if config_path:
        cfg = ex.ExperimentConfig.from_json_file(config_path)
    else:
        cfg = ex.ExperimentConfig(scenario=scenario, out_dir=out)
    if seed is not None:
        cfg.seed = seed
    if budget is not None:
        cfg.budget = budget
    if out is not None:
        cfg.out_dir = out
    report = ex.run(cfg)
    for c in report.checks:
        click.echo(f"[{'PASS' if c.passed else 'FAIL'}] {report.scenario}: {c.name}  value={c.value}  target=({c.target})")
    sys.exit(0 if report.passed else 1)


@main.command("report")
@click.option("--all", "run_all", is_flag=True, required=True)
@click.option("--out", default="reports", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--figures", "render_figures", is_flag=True,
              help="after the runs, render figures via the separate figures tool if installed")
def report_cmd(run_all, out, seed, render_figures):
    """Run every scenario; exit 0 iff all checks pass."""
    ok = True
    for name in ex.scenario_names():
        cfg = ex.ExperimentConfig(scenario=name, out_dir=out, seed=seed)
        report = ex.run(cfg)
        for c in report.checks:
            click.echo(f"[{'PASS' if c.passed else 'FAIL'}] {name}: {c.name}  value={c.value}")
        ok = ok and report.passed
    sweep_path = f"{out}/pencil_sweep.csv"
    rows = [(r["alpha"], r["p"], r["inv_p"], r["regime"]) for r in pc.pencil_sweep()]
    ex.write_csv(sweep_path, "pencil", "sweep", ("alpha", "p", "inv_p", "regime"), rows)
    if render_figures:
        for kind, src, img in [
            ("pencil", sweep_path, f"{out}/pencil.png"),
            ("growth", f"{out}/counterexample-growth_er_growth.csv", f"{out}/growth.png"),
            ("weaktype", f"{out}/weak-type-1d_weaktype.csv", f"{out}/weaktype.png"),
        ]:
            try:
                subprocess.run(["figures", kind, "--in", src, "--out", img], check=True)
                click.echo(f"figure: {img}")
            except (OSError, subprocess.CalledProcessError) as e:
                click.echo(f"figure rendering skipped ({kind}): {e}", err=True)
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
