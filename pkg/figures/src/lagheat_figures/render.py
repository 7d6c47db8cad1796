"""Deterministic rendering of the three figure kinds.

Every figure is a pure function of the CSV bytes and the spec: fixed style,
no timestamps, a pinned SVG hash salt, and metadata stripped, so identical
inputs give byte-identical image files.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_SCHEMA = 1  # must match the numerical component's CSV schema

KINDS = ("pencil", "growth", "weaktype")

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 130,
    "font.size": 9.5,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "lagheat-figures",
    "savefig.bbox": "tight",
}

REGIME_COLORS = {
    "strong": "#2a6f4e",
    "standard-strong": "#7fbf9e",
    "standard-weak-11": "#b8ddc8",
    "weak-p1": "#e4b33c",
    "restricted-weak-p0": "#d98032",
    "log-weak-p1": "#caa3d8",
    "log-restricted-weak-p0": "#9a6fb3",
    "unbounded": "#c43b3b",
    "not-covered": "#999999",
}


class SchemaMismatchError(RuntimeError):
    """The CSV header declares a schema this renderer does not understand."""


class MissingColumnsError(RuntimeError):
    pass


@dataclass
class FigureSpec:
    kind: str
    csv_path: str
    out_path: str
    x_range: tuple | None = None
    y_range: tuple | None = None
    title: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")


def read_csv(path):
    """Rows of a lagheat CSV; validates the schema comment line."""
    path = Path(path)
    with open(path, newline="") as fh:
        first = fh.readline()
        m = re.match(r"#\s*lagheat-csv\s+schema_version=(\d+)", first)
        if not m:
            raise SchemaMismatchError(f"{path} lacks the lagheat schema header line")
        version = int(m.group(1))
        if version != EXPECTED_SCHEMA:
            raise SchemaMismatchError(
                f"{path} declares schema_version={version}, renderer expects {EXPECTED_SCHEMA}"
            )
        reader = csv.DictReader(fh)
        rows = list(reader)
    if not rows:
        raise MissingColumnsError(f"{path} has no data rows")
    return rows


def _require(rows, *columns):
    missing = [c for c in columns if c not in rows[0]]
    if missing:
        raise MissingColumnsError(f"missing columns: {missing}")


def _render_pencil(rows, ax):
    _require(rows, "alpha", "inv_p", "regime")
    alphas = np.array([float(r["alpha"]) for r in rows])
    inv_ps = np.array([float(r["inv_p"]) for r in rows])
    regimes = [r["regime"] for r in rows]
    a_vals = np.unique(alphas)
    p_vals = np.unique(inv_ps)
    grid = np.zeros((len(p_vals), len(a_vals)))
    names = sorted(set(regimes))
    code = {n: i for i, n in enumerate(names)}
    for a, ip, rg in zip(alphas, inv_ps, regimes):
        grid[np.searchsorted(p_vals, ip), np.searchsorted(a_vals, a)] = code[rg]
    from matplotlib.colors import ListedColormap

    cmap = ListedColormap([REGIME_COLORS.get(n, "#777777") for n in names])
    ax.pcolormesh(a_vals, p_vals, grid, cmap=cmap, vmin=-0.5, vmax=len(names) - 0.5)
    # boundary lines of the bounded region: 1/p = -alpha/2 and 1/p = 1 + alpha/2
    neg = np.linspace(min(a_vals.min(), -0.99), 0.0, 60)
    ax.plot(neg, -neg / 2.0, "k-", lw=1.4)
    ax.plot(neg, 1.0 + neg / 2.0, "k-", lw=1.4)
    ax.set_xlabel("type parameter")
    ax.set_ylabel("1/p")
    handles = [plt.Line2D([], [], marker="s", ls="", color=REGIME_COLORS.get(n, "#777777"), label=n) for n in names]
    ax.legend(handles=handles, loc="upper right", fontsize=7, framealpha=0.9)


def _render_growth(rows, ax):
    _require(rows, "R", "lambda", "measure")
    Rs = sorted({float(r["R"]) for r in rows})
    for R in Rs:
        sel = [r for r in rows if float(r["R"]) == R]
        lam = np.array([float(r["lambda"]) for r in sel])
        m = np.array([float(r["measure"]) for r in sel])
        order = np.argsort(lam)
        ax.loglog(lam[order], m[order], marker="o", ms=2.5, label=f"R = {R:g}")
        if "law" in sel[0]:
            law = np.array([float(r["law"]) for r in sel])[order]
            ax.loglog(lam[order], law, ls="--", lw=0.8, color="gray")
    ax.set_xlabel("level")
    ax.set_ylabel("superlevel measure")
    ax.legend(fontsize=8)


def _render_weaktype(rows, ax):
    _require(rows, "tau", "lambda", "measure")
    taus = sorted({float(r["tau"]) for r in rows})
    for tau in taus:
        sel = [r for r in rows if float(r["tau"]) == tau]
        lam = np.array([float(r["lambda"]) for r in sel])
        m = np.array([float(r["measure"]) for r in sel])
        live = m > 0
        order = np.argsort(lam[live])
        ax.loglog(lam[live][order], m[live][order], lw=1.0, label=f"tau = {tau:g}")
    ax.set_xlabel("level")
    ax.set_ylabel("superlevel measure")
    ax.legend(fontsize=7)


def render(spec: FigureSpec) -> str:
    """Render one figure; returns the output path.  Deterministic: identical
    CSV bytes and spec give identical image bytes."""
    rows = read_csv(spec.csv_path)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        if spec.kind == "pencil":
            _render_pencil(rows, ax)
        elif spec.kind == "growth":
            _render_growth(rows, ax)
        else:
            _render_weaktype(rows, ax)
        if spec.title:
            ax.set_title(spec.title)
        if spec.x_range:
            ax.set_xlim(*spec.x_range)
        if spec.y_range:
            ax.set_ylim(*spec.y_range)
        out = Path(spec.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        meta = {"Date": None} if out.suffix == ".svg" else {"Software": None}
        fig.savefig(out, metadata=meta)
        plt.close(fig)
    return str(out)
