"""Renderer tests: schema validation, the three figure kinds, deterministic
output bytes, and failure without partial files."""

import hashlib
import math
from pathlib import Path

import numpy as np
import pytest

from lagheat_figures import FigureSpec, SchemaMismatchError, read_csv, render
from lagheat_figures.cli import main as cli_main


def write_rows(path, kind, header, rows, schema=1):
    with open(path, "w") as fh:
        fh.write(f"# lagheat-csv schema_version={schema} scenario=test kind={kind}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in row) + "\n")
    return str(path)


@pytest.fixture
def pencil_csv(tmp_path):
    rows = []
    for a in np.linspace(-0.95, 1.0, 30):
        for ip in np.linspace(0.02, 0.98, 25):
            if a < 0:
                if -a / 2 < ip < 1 + a / 2:
                    regime = "strong"
                elif ip in (-a / 2, 1 + a / 2):
                    regime = "weak-p1"
                else:
                    regime = "unbounded"
            else:
                regime = "standard-strong"
            rows.append((float(a), 1.0 / ip, float(ip), regime))
    return write_rows(tmp_path / "sweep.csv", "sweep", ("alpha", "p", "inv_p", "regime"), rows)


@pytest.fixture
def growth_csv(tmp_path):
    rows = []
    for R in (1e2, 1e6):
        for lam in np.geomspace(0.3, 30, 12):
            law = lam**-4 * math.log(2 + lam**4 * math.log(R))
            rows.append((R, float(lam), law * 1.4, law))
    return write_rows(tmp_path / "growth.csv", "er_growth", ("R", "lambda", "measure", "law"), rows)


@pytest.fixture
def weaktype_csv(tmp_path):
    rows = []
    for tau in (0.01, 0.1, 1.0):
        for lam in np.geomspace(1e-2, 10, 20):
            rows.append((tau, float(lam), min(1.0, float(lam) ** -4)))
    return write_rows(tmp_path / "wt.csv", "weaktype", ("tau", "lambda", "measure"), rows)


class TestSchema:
    def test_missing_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("alpha,p\n1,2\n")
        with pytest.raises(SchemaMismatchError):
            read_csv(p)

    def test_version_mismatch(self, tmp_path):
        p = write_rows(tmp_path / "v9.csv", "x", ("a",), [(1.0,)], schema=9)
        with pytest.raises(SchemaMismatchError):
            read_csv(p)

    def test_empty_rejected_and_no_file_written(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("# lagheat-csv schema_version=1 scenario=t kind=t\na,b\n")
        out = tmp_path / "out.png"
        rc = cli_main(["growth", "--in", str(p), "--out", str(out)])
        assert rc == 2
        assert not out.exists()


class TestRender:
    def test_pencil(self, pencil_csv, tmp_path):
        out = render(FigureSpec("pencil", pencil_csv, str(tmp_path / "pencil.png")))
        assert Path(out).stat().st_size > 5000

    def test_growth(self, growth_csv, tmp_path):
        out = render(FigureSpec("growth", growth_csv, str(tmp_path / "g.png")))
        assert Path(out).exists()

    def test_weaktype(self, weaktype_csv, tmp_path):
        out = render(FigureSpec("weaktype", weaktype_csv, str(tmp_path / "w.png")))
        assert Path(out).exists()

    def test_unknown_kind(self, growth_csv, tmp_path):
        with pytest.raises(ValueError):
            FigureSpec("volcano", growth_csv, str(tmp_path / "v.png"))

    def test_missing_columns(self, tmp_path):
        p = write_rows(tmp_path / "m.csv", "x", ("foo", "bar"), [(1.0, 2.0)])
        from lagheat_figures.render import MissingColumnsError

        with pytest.raises(MissingColumnsError):
            render(FigureSpec("growth", p, str(tmp_path / "m.png")))

    @pytest.mark.parametrize("kind_fixture", ["pencil_csv", "growth_csv", "weaktype_csv"])
    def test_deterministic_bytes(self, kind_fixture, tmp_path, request):
        csv_path = request.getfixturevalue(kind_fixture)
        kind = {"pencil_csv": "pencil", "growth_csv": "growth", "weaktype_csv": "weaktype"}[kind_fixture]
        hashes = []
        for run_i in (1, 2):
            out = tmp_path / f"{kind}-{run_i}.png"
            render(FigureSpec(kind, csv_path, str(out)))
            hashes.append(hashlib.sha256(out.read_bytes()).hexdigest())
        assert hashes[0] == hashes[1]


def test_cli_end_to_end(growth_csv, tmp_path, capsys):
    out = tmp_path / "fig.png"
    rc = cli_main(["growth", "--in", growth_csv, "--out", str(out)])
    assert rc == 0
    assert out.exists()
    assert str(out) in capsys.readouterr().out
