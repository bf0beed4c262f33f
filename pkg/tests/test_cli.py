import json
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from gapdist.cli import parse_matrix, run
from gapdist.config import build_config
from gapdist.output import (
    COMPARE_SCHEMA,
    TANGENCY_SCHEMA,
    THEORY_SCHEMA,
    circles_in_svg,
    emit_csv,
    read_csv,
    render_svg,
)
from gapdist.theory import pair_component_F


def test_schemas():
    assert TANGENCY_SCHEMA == ("alpha", "kappa")
    assert THEORY_SCHEMA == ("s", "F")
    assert COMPARE_SCHEMA == ("s", "F_empirical", "F_theory")


def test_emit_csv_roundtrip(tmp_path):
    p = tmp_path / "x.csv"
    text = emit_csv([(0.1, 2), (1 / 3, 8)], TANGENCY_SCHEMA, p)
    assert text.splitlines()[0] == "alpha,kappa"
    back = read_csv(p)
    assert back["alpha"][1] == 1 / 3 and back["kappa"].tolist() == [2, 8]
    with pytest.raises(ValueError):
        emit_csv([(1, 2, 3)], TANGENCY_SCHEMA, p)


def test_render_classical(tmp_path):
    cfg = build_config("classical")
    svg = render_svg(cfg, 200, tmp_path / "c.svg", width=1000)
    scale = 500.0
    # pixel coordinates carry four decimals
    radii = sorted({round(r / scale, 6) for _, _, r in circles_in_svg(svg)})
    expected = sorted({round(1 / (2 * q * q), 6) for q in range(1, 11)})
    assert np.allclose(radii, expected, rtol=0, atol=1e-6)
    for cx, cy, r in circles_in_svg(svg):
        x = Fraction((cx - 10) / scale).limit_denominator(10)
        assert abs(float(x) - (cx - 10) / scale) < 1e-6
        assert abs(r / scale - 1 / (2 * x.denominator**2)) < 1e-6


def test_render_initial_only(ap3):
    svg = render_svg(ap3, 0.5)
    assert len(circles_in_svg(svg)) == 5  # C2, C3, C4 and the mirrors of C2, C3


def test_render_ap9_well_formed(ap9, tmp_path):
    out = tmp_path / "a.svg"
    assert run(["render", "--config", "ap9", "--T", "500", "--out", str(out)]) == 0
    assert len(circles_in_svg(out.read_text())) > 10


def test_theory_cli(tmp_path, capsys):
    out = tmp_path / "F.csv"
    assert run(["theory", "--config", "classical", "--grid", "0:6:600", "--tol", "1e-6", "--out", str(out)]) == 0
    F = read_csv(out)
    assert list(F) == ["s", "F"] and len(F["s"]) == 600
    z = pair_component_F(build_config("classical"), 1, 2, F["s"])
    # F = 3 F^{1,2} = 4 m(Z1)
    assert np.allclose(F["F"], 3 * z.values, atol=1e-14)


def test_theory_dump_regions(tmp_path):
    out, dump = tmp_path / "F.csv", tmp_path / "regions.json"
    assert run(["theory", "--config", "ap3", "--grid", "0:2:5", "--out", str(out), "--dump-regions", str(dump)]) == 0
    d = json.loads(dump.read_text())
    assert len(d["regions"]) == 12


def test_reproducible_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert run(["enumerate", "--config", "ap9", "--T", "3000", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    for p in (a, b):
        assert run(["theory", "--config", "ap9", "--method", "montecarlo", "--seed", "3",
                    "--grid", "0:4:9", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_enumerate_and_compare(tmp_path, capsys):
    e, t, c = tmp_path / "e.csv", tmp_path / "t.csv", tmp_path / "c.csv"
    assert run(["gaps", "--config", "classical", "--T", "20000", "--out", str(e)]) == 0
    assert run(["theory", "--config", "classical", "--out", str(t)]) == 0
    capsys.readouterr()
    assert run(["compare", "--empirical", str(e), "--theory", str(t), "--out", str(c)]) == 0
    ks = float(capsys.readouterr().out.split("=")[1])
    assert ks < 0.02
    assert list(read_csv(c)) == list(COMPARE_SCHEMA)


def test_density_cli(tmp_path):
    out = tmp_path / "d.csv"
    assert run(["density", "--config", "ap3", "--grid", "0:6:61", "--out", str(out)]) == 0
    d = read_csv(out)
    assert list(d) == ["s", "density"] and np.all(d["density"][:2] == 0)


def test_transfer_cli(capsys):
    assert run(["transfer", "--config", "classical", "--matrix", "1,0,1,1", "--T", "20000",
                "--interval", "0.2:0.9", "--grid", "0:6:13"]) == 0
    assert "KS" in capsys.readouterr().err


def test_config_commands(tmp_path, capsys):
    assert run(["config", "validate", "ap9"]) == 0
    capsys.readouterr()
    assert run(["config", "constants", "ap3"]) == 0
    k = json.loads(capsys.readouterr().out)
    assert k["D"] == pytest.approx(4 * 2**0.5, abs=1e-12)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "bad", "period_t": 2.0,
                               "circles": [[0.0, 0.5], [1.0, 0.4]]}))
    assert run(["config", "validate", str(bad)]) == 1
    assert "TangencyViolation" in capsys.readouterr().err


def test_exit_codes(tmp_path, capsys):
    assert run(["theory", "--bogus"]) == 1
    assert run([]) == 1
    assert run(["enumerate", "--config", "classical", "--T", "-1"]) == 1
    assert run(["enumerate", "--config", str(tmp_path / "missing.json"), "--T", "5"]) == 1
    assert run(["transfer", "--config", "classical", "--matrix", "0,-1,1,0", "--T", "100",
                "--interval=-1:1"]) == 2
    assert run(["groups-check"]) == 0
    assert run(["good-census", "--T", "25"]) == 0


def test_parse_matrix():
    M = parse_matrix("1, 0, 1+2i, 1")
    assert M.c / M.a == pytest.approx(1 + 2j)
    assert abs(M.a * M.d - M.b * M.c - 1) < 1e-14


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "gapdist.cli", "config", "validate", "classical"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "valid" in r.stdout
