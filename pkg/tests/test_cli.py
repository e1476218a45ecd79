import csv
import json
import numpy as np
import os
import inspect
import sys

import pytest

LOCATION = "/".join(os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe()))).split("/")[:-1])
sys.path.insert(0, LOCATION)

from eigenloc import __version__, cli
from eigenloc.config import RunConfig
from eigenloc.herglotz import build_cap_cover
from eigenloc.io import read_json
from eigenloc.torus import first_admissible

# SETUP
TARGET = {"kind": "bessel_sum", "n": 3, "m": 1, "radius": 1.5,
          "centers": [[0.8, 0., 0.], [0., -0.5, 1.2]], "coefficients": [1., -0.6]}
N_TORUS = first_admissible(build_cap_cover(3, 0.7), range(1, 501, 2))


def rows(path):
    with open(path) as fp:
        return list(csv.DictReader(fp))


def test_lattice(tmpdir):
    out = str(tmpdir)
    assert cli.main(["lattice", "--n", "3", "--N", "3", "--out", out]) == 0
    assert len(rows(os.path.join(out, "lattice.csv"))) == 30
    summary = read_json(os.path.join(out, "lattice.json"))
    assert summary["count"] == 30 and summary["symmetric"]
    caps = rows(os.path.join(out, "caps.csv"))
    assert len(caps) == summary["cells"]
    assert sum(int(r["count"]) for r in caps) == 30


def test_manifest(tmpdir):
    out = str(tmpdir)
    cli.main(["lattice", "--n", "2", "--N", "65", "--eps", "1.0", "--out", out])
    manifest = read_json(os.path.join(out, "manifest.json"))
    assert manifest["exit_code"] == 0
    assert manifest["version"] == __version__
    assert manifest["subcommand"] == "lattice"
    assert manifest["config"]["N"] == 65
    assert manifest["artifacts"] == ["lattice.csv", "caps.csv", "lattice.json"]
    assert read_json(os.path.join(out, "lattice.json"))["admissible"]


def test_cover_is_deterministic(tmpdir):
    first, second = str(tmpdir.join("a")), str(tmpdir.join("b"))
    for out in (first, second):
        assert cli.run("cover", RunConfig(n=3, eps=0.6, out=out)) == 0
    for name in ("cover.json", "cells.csv"):
        assert open(os.path.join(first, name)).read() == open(os.path.join(second, name)).read()


def test_verify_torus(tmpdir):
    out = str(tmpdir)
    cfg = RunConfig(manifold="torus", n=3, N=N_TORUS, eps=0.7, target=TARGET, out=out)
    assert cli.run("verify", cfg) == 0
    report = read_json(os.path.join(out, "verify.json"))
    assert report["passed"]
    assert {c["name"] for c in report["checks"]} == {"eigen_residual", "rescaling", "realness"}


def test_verify_sphere(tmpdir):
    out = str(tmpdir)
    assert cli.main(["verify", "--manifold", "sphere", "--n", "3", "--N", "60", "--target", json.dumps(TARGET),
                     "--out", out]) == 0
    assert read_json(os.path.join(out, "verify.json"))["passed"]


def test_failed_verification(tmpdir, monkeypatch):
    monkeypatch.setattr(cli, "_verify_torus", lambda psi, rng: [cli._check("forced", 1., 0.)])
    out = str(tmpdir)
    cfg = RunConfig(manifold="torus", n=3, N=N_TORUS, eps=0.7, target=TARGET, out=out)
    assert cli.run("verify", cfg) == 3
    error = read_json(os.path.join(out, "error.json"))
    assert error["error"] == "VerificationError" and error["exit_code"] == 3
    assert "verify.json" in read_json(os.path.join(out, "manifest.json"))["artifacts"]


def test_approximate(tmpdir):
    out = str(tmpdir)
    assert cli.run("approximate", RunConfig(n=3, eps=0.5, h=0.2, target=TARGET, out=out)) == 0
    report = read_json(os.path.join(out, "approximate.json"))
    assert report["bessel_error"] == 0
    assert report["plane_wave_terms"] == report["cells"] * 2
    assert 0 < report["plane_wave_error"] < 1
    planes = read_json(os.path.join(out, "plane_wave_sum.json"))
    assert planes["kind"] == "plane_wave_sum"


def test_synthesize_sphere(tmpdir):
    out = str(tmpdir)
    assert cli.run("synthesize", RunConfig(n=3, N=200, h=0.2, target=TARGET, out=out)) == 0
    psi = read_json(os.path.join(out, "sphere.json"))
    assert psi["eigenvalue"] == 200 * 202
    assert len(psi["points"]) == 2
    assert read_json(os.path.join(out, "synthesize.json"))["error"] < 0.05
    grid = rows(os.path.join(out, "grid.csv"))
    assert set(grid[0]) == {"x1", "x2", "x3", "psi1"}


def test_nodal(tmpdir):
    out = str(tmpdir)
    kernel = {"kind": "bessel_sum", "centers": [[0., 0., 0.]], "coefficients": [1.]}
    assert cli.run("nodal", RunConfig(n=3, N=100, h=0.2, radius=4., target=kernel, out=out)) == 0
    report = read_json(os.path.join(out, "nodal.json"))
    assert len(report["references"]) == 1
    assert report["references"][0]["euler"] == 2
    assert os.path.exists(os.path.join(out, "reference_0.obj"))
    assert os.path.exists(os.path.join(out, "reference_0.csv"))


def test_error_scan_sphere(tmpdir):
    out = str(tmpdir)
    cfg = RunConfig(n=3, N_range=[50, 100, 200], target=TARGET, h=0.1, r=0, out=out)
    assert cli.run("error-scan", cfg) == 0
    scan = rows(os.path.join(out, "scan.csv"))
    assert [int(r["N"]) for r in scan] == [50, 100, 200]
    assert all(r["status"] == "ok" for r in scan)
    errors = [float(r["error"]) for r in scan]
    assert errors[0] > errors[1] > errors[2]


def test_error_scan_records_empty_cells(tmpdir):
    out = str(tmpdir)
    cfg = RunConfig(manifold="torus", n=3, N_range=[1, N_TORUS], eps=0.7, target=TARGET, h=0.2, out=out)
    assert cli.run("error-scan", cfg) == 0
    scan = rows(os.path.join(out, "scan.csv"))
    assert scan[0]["status"] == "empty_cells"
    assert np.isnan(float(scan[0]["error"]))
    assert scan[1]["status"] == "ok"


def test_empty_cells_exit_code(tmpdir):
    out = str(tmpdir)
    cfg = RunConfig(manifold="torus", n=3, N=3, eps=0.3, target=TARGET, out=out)
    assert cli.run("synthesize", cfg) == 3
    assert read_json(os.path.join(out, "error.json"))["error"] == "EmptyCellError"
    assert read_json(os.path.join(out, "manifest.json"))["exit_code"] == 3


def test_bad_config_file(tmpdir):
    path = str(tmpdir.join("run.json"))
    with open(path, "w") as fp:
        json.dump({"epsilon": 1.}, fp)
    out = str(tmpdir.join("out"))
    assert cli.main(["cover", "--config", path, "--out", out]) == 2
    error = read_json(os.path.join(out, "error.json"))
    assert error["exit_code"] == 2 and "epsilon" in error["message"]
    assert os.path.exists(os.path.join(out, "manifest.json"))


@pytest.mark.parametrize("subcommand,config", [
    ("lattice", {"n": 3}),
    ("cover", {"eps": -1.}),
    ("synthesize", {"N": 10}),
    ("transmogrify", {}),
])
def test_invalid_input_exit_code(tmpdir, subcommand, config):
    out = str(tmpdir)
    assert cli.run(subcommand, RunConfig(out=out, **config)) == 2
    assert read_json(os.path.join(out, "error.json"))["exit_code"] == 2


def test_dimension_mismatch(tmpdir):
    cfg = RunConfig(n=2, N=20, target=TARGET, out=str(tmpdir))
    assert cli.run("synthesize", cfg) == 2


def test_no_subcommand():
    assert cli.main([]) == 2


def test_component_mismatch(tmpdir):
    out = str(tmpdir)
    assert cli.main(["synthesize", "--n", "3", "--m", "2", "--N", "20", "--target", json.dumps(TARGET),
                     "--out", out]) == 2
    assert "components" in read_json(os.path.join(out, "error.json"))["message"]
