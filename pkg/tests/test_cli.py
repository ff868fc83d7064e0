from __future__ import annotations

import json
import subprocess
import sys

import pytest

from flatlab.builders import l_origami
from flatlab.cli import main
from flatlab.reports import parse_report
from flatlab.surface_io import dumps, loads
from flatlab.triangulation import equivalent


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_build_and_show(capsys, tmp_path):
    code, out, _ = run(capsys, "build", "origami (1,2) (1,3)")
    assert code == 0
    assert equivalent(loads(out), l_origami())
    path = tmp_path / "l.txt"
    path.write_text(out)
    code, out, _ = run(capsys, "show", str(path))
    summary = parse_report(out)[0]
    assert (summary.genus, summary.orders, summary.area) == (2, (2,), 3)


def test_saddles_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "saddles", "torus", "--bound", "1")
    assert code == 0
    rows = parse_report(out, "csv", "saddle_connection")
    assert len(rows) == 4


def test_global_options_after_subcommand(capsys):
    code, out, _ = run(capsys, "saddles", "torus", "--bound", "1", "--format", "csv")
    assert code == 0 and out.startswith("holonomy_x,")


def test_cylinders(capsys):
    code, out, _ = run(capsys, "cylinders", "l-origami", "--direction", "1,1")
    dec = parse_report(out)[0]
    assert dec.decomposed and len(dec.cylinders) == 1


def test_lattice_scan_and_directions(capsys):
    code, out, _ = run(capsys, "lattice-scan", "golden-l", "--bound", "3")
    ev = parse_report(out)[0]
    assert code == 0 and ev.verdict.value == "ConsistentWithLattice"
    code, out, _ = run(capsys, "lattice-scan", "golden-l", "--bound", "3", "--directions", "--format", "csv")
    reports = parse_report(out, "csv", "direction_report")
    assert len(reports) == ev.directions_scanned


def test_hmin_and_survey(capsys):
    code, out, _ = run(capsys, "--format", "csv", "hmin", "l-origami")
    assert out.splitlines() == ["direction_p,direction_q,d,period", "1,0,1,2"]
    code, out, _ = run(capsys, "--format", "csv", "orbit-survey", "l-origami", "--bound", "2")
    assert out.splitlines()[0] == "direction_p,direction_q,d,period"
    assert len(out.splitlines()) > 2


def test_track(capsys):
    code, out, _ = run(capsys, "track", "octagon", "--t", "1", "--psi", "0.1,1e-6", "--backend", "numpy")
    recs = parse_report(out)
    assert [r.psi for r in recs] == [0.1, 1e-6]
    assert recs[1].distance < recs[0].distance


def test_sl2(capsys):
    code, out, _ = run(capsys, "sl2", "decompose", "--which", "bruhat", "--matrix", "0,-1,1,0")
    rep = parse_report(out)[0]
    assert code == 0 and rep.branch == "iota" and rep.residual == 0


def test_out_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "--out", str(target), "show", "octagon")
    assert code == 0 and out == ""
    assert parse_report(target.read_text())[0].genus == 2


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"format": "csv", "bound": 1}))
    code, out, _ = run(capsys, "--config", str(cfg), "saddles", "torus")
    assert out.startswith("holonomy_x,") and len(out.splitlines()) == 5
    # flags win over the file
    code, out, _ = run(capsys, "--config", str(cfg), "saddles", "torus", "--format", "json")
    assert out.lstrip().startswith("{")


@pytest.mark.parametrize(
    "argv",
    [
        ["show", "no-such-builder"],
        ["saddles", "torus"],
        ["cylinders", "torus", "--direction", "0,0"],
        ["sl2", "decompose", "--which", "iwasawa", "--matrix", "2,0,0,1"],
        ["cylinders", "torus", "--direction", "1,x"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("flatlab: ")


def test_bad_surface_file_exit_2(capsys, tmp_path):
    bad = dumps(l_origami()).replace("glue S1.1 S2.3", "glue S1.1 S2.0")
    path = tmp_path / "bad.txt"
    path.write_text(bad)
    code, _, err = run(capsys, "show", str(path))
    assert code == 2 and "line" in err


def test_resource_cap_exit_3(capsys):
    code, _, err = run(capsys, "--max-frontier", "50", "saddles", "octagon", "--bound", "10")
    assert code == 3
    assert "resource cap" in err


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "flatlab.cli", "--format", "csv", "hmin", "torus"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == "1,0,1,1"
