import json
import math
import re
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from lgpcurve import cli
from lgpcurve.config import JobConfig, parse_box
from lgpcurve.export import (ExportError, export, load_schema, piece_callables, read_json,
                             read_polyline, sample_piece)
from lgpcurve.fixtures import EX1
from lgpcurve.pipeline import PipelineError, run, run_plane_pipeline
from lgpcurve.space import ErrorBudget


def plane(text, eps, box="-2,2,-2,2"):
    return run_plane_pipeline(JobConfig(text, None, parse_box(box, 4), eps))


@pytest.fixture(scope="module")
def circle():
    return plane("x^2+y^2-3", 0.0044)


def test_plane_circle(circle):
    assert len(circle.pieces) >= 8
    assert all(c["total"] <= 0.0044 for c in circle.certificates["pieces"])
    assert circle.topology["loops"] == 1


def test_plane_empty():
    out = plane("x^2+y^2+1", 0.01)
    assert out.pieces == []
    doc = read_json(export(out, "json"))
    jsonschema.validate(doc, load_schema())
    assert b"<path" not in export(out, "svg")


def test_plane_nodal_cubic():
    out = plane("y^2-x^2*(x+1)", 0.01)
    assert out.topology["singular_degrees"] == [4]


def test_certificates_complete(ex1):
    certs = ex1.certificates
    assert len(certs["pieces"]) == len(ex1.pieces)
    ids = {c["id"] for c in certs["pieces"]}
    assert ids == {p.id for p in ex1.pieces}
    in_matrix = {c["a"] for c in certs["disjointness"]} | {c["b"] for c in certs["disjointness"]}
    assert in_matrix == ids


def test_budget_consistency(ex1):
    b = ex1.certificates["budget"]
    bud = ErrorBudget.make(b["eps"], ex1.extras["shear"].s)
    assert bud.verify() and bud.eps_nonvt == b["eps_nonvt"] and bud.eps_vt == b["eps_vt"]


def test_json_round_trip(ex1):
    data = export(ex1, "json")
    doc = read_json(data)
    jsonschema.validate(doc, load_schema())
    forms = piece_callables(doc)
    assert len(forms) == len(ex1.pieces)
    for p, f, pc in zip(ex1.pieces, forms, doc["pieces"]):
        dom = [float(v) for v in pc["domain"]]
        assert np.array_equal(sample_piece(f, dom, 7), sample_piece(p.form, p.x_domain, 7))
    for pc in doc["pieces"]:
        for k, v in pc["graph"]["p"]["exact"].items():
            num, _, den = v.partition("/")
            assert float(int(num) / int(den or 1)) == float(pc["graph"]["p"]["coefficients"][k])


def test_json_deterministic(ex1):
    ex = EX1
    again = run(JobConfig(ex["f"], ex["g"], parse_box(ex["box"], 6), ex["eps"]))
    assert export(again, "json") == export(ex1, "json")


def test_json_17_digits(ex1):
    doc = json.loads(export(ex1, "json"))
    c = doc["pieces"][0]["domain"][0]
    assert float(c) == ex1.pieces[0].x_domain[0] and c == format(ex1.pieces[0].x_domain[0], ".17g")


def test_svg_paths(circle):
    svg = export(circle, "svg").decode()
    assert svg.count("<path") == len(circle.pieces)
    assert 'version="1.1"' in svg


def test_svg_space_rejected(ex1):
    with pytest.raises(ExportError):
        export(ex1, "svg")


def test_polyline_residuals(ex1):
    data = export(ex1, "polyline", density=100)
    polys = read_polyline(data)
    assert len(polys) == len(ex1.pieces) and all(len(p) == 100 for p in polys)
    eps = EX1["eps"]
    for P in polys:
        x, y, z = P.T
        f = x * x + y * y + z * z - 4
        g = (z - 1) * (x * x + y * y - 3 * z * z)
        gf = 2 * np.sqrt(x * x + y * y + z * z)
        # distance to the curve is at least |f|/|grad f| near the sphere; g vanishes on a
        # cone and a plane, so its scaled residual is the smaller of the two factor distances
        assert np.all(np.abs(f) / gf <= eps)
        dcone = np.abs(x * x + y * y - 3 * z * z) / (2 * np.sqrt(x * x + y * y + 9 * z * z))
        assert np.all(np.minimum(np.abs(z - 1), dcone) <= eps)


def test_unknown_format(ex1):
    with pytest.raises(ExportError):
        export(ex1, "pdf")
    with pytest.raises(ExportError):
        export(ex1, "polyline", density=1)


def test_reader_rejects_foreign():
    with pytest.raises(ExportError):
        read_json(b'{"format": "other", "version": 1}')


def test_stage_errors():
    with pytest.raises(PipelineError) as exc:
        run(JobConfig("x^2+", "z", parse_box("-1,1,-1,1,-1,1", 6), 0.01))
    assert exc.value.stage == "parse" and exc.value.hint
    with pytest.raises(PipelineError) as exc:
        run(JobConfig(EX1["f"], EX1["g"], parse_box(EX1["box"], 6), 0.01, s=2))
    assert exc.value.stage == "shear"


def test_config_validation():
    with pytest.raises(ValueError):
        JobConfig("x", None, (0, 1, 0, 1), 0)
    with pytest.raises(ValueError):
        parse_box("1,0,0,1", 4)


def test_cli_approx2d(tmp_path, capsys):
    out = tmp_path / "c.svg"
    assert cli.main(["approx2d", "--f", "x^2+y^2-3", "--eps", "0.0044", "--export", "svg",
                     "--out", str(out)]) == 0
    assert out.read_text().count("<path") >= 8


def test_cli_approx3d_s_override(tmp_path):
    out = tmp_path / "e1.json"
    assert cli.main(["approx3d", "--f", EX1["f"], "--g", EX1["g"], "--s", "1", "--out", str(out)]) == 0
    doc = read_json(str(out))
    assert doc["provenance"]["s"] == "1"
    assert cli.main(["approx3d", "--f", EX1["f"], "--g", EX1["g"], "--s", "2", "--out",
                     str(tmp_path / "bad.json")]) == 2


def test_cli_seed_grid(tmp_path):
    out = tmp_path / "e1.obj"
    assert cli.main(["approx3d", "--f", EX1["f"], "--g", EX1["g"], "--seed-grid", "1/2,1,2",
                     "--export", "polyline", "--density", "10", "--out", str(out)]) == 0
    assert out.read_text().startswith("# lgpcurve-piecewise polyline")


def test_cli_report(tmp_path):
    assert cli.main(["report", "--f", "y^2-x^2*(x+1)", "--out", str(tmp_path)]) == 0
    for name in ("curve.png", "errors.png", "pieces.csv"):
        assert (tmp_path / name).stat().st_size > 0
    rows = (tmp_path / "pieces.csv").read_text().splitlines()
    assert rows[0].startswith("id,kind")


def test_cli_log_env(tmp_path):
    env = {"LGPCURVE_LOG": "INFO", "PATH": "/usr/bin:/bin"}
    r = subprocess.run([sys.executable, "-m", "lgpcurve.cli", "approx2d", "--f", "x^2+y^2-3",
                        "--out", str(tmp_path / "o.json")], env=env, capture_output=True, text=True)
    assert r.returncode == 0 and "pieces" in r.stderr
