import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from fermat_frechet.cli import main
from fermat_frechet.geometry import CurvedSpace, project_to_model

from conftest import measure_edges, random_model_points


@pytest.fixture
def problem(tmp_path, rng):
    lengths = list(rng.uniform(0.78, 1.0, size=6))
    prob = {"n": 3, "k": 0.0, "lengths": lengths, "weights": [1.2, 1.0, 0.9, 1.1]}
    path = tmp_path / "prob.json"
    path.write_text(json.dumps(prob))
    return path, prob


def test_solve_report_shape(problem, tmp_path):
    path, prob = problem
    out = tmp_path / "sol.json"
    assert main(["solve", "--input", str(path), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["schema"] == "ffm-1"
    assert rep["count"] <= 30
    assert rep["count"] == len(rep["entries"])
    assert rep["max_count"] == 30
    assert "stationary" in rep["tolerances"]
    for entry in rep["entries"]:
        assert entry["classification"]["kind"] in ("floating", "absorbed")
        assert len(entry["branches"]) == 4


def test_enumerate_all_equal(tmp_path):
    lpath = tmp_path / "l.json"
    lpath.write_text("[1,1,1,1,1,1]")
    out = tmp_path / "en.json"
    assert main(["enumerate", "--n", "3", "--k", "0", "--lengths", str(lpath),
                 "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["count"] == 1


def test_check_on_solver_output(problem, tmp_path):
    path, prob = problem
    out = tmp_path / "sol.json"
    main(["solve", "--input", str(path), "--out", str(out)])
    chk = tmp_path / "chk.json"
    assert main(["check", "--input", str(out), "--out", str(chk)]) == 0
    rep = json.loads(chk.read_text())
    assert rep["passed"] is True


def test_check_rejects_tampered_report(problem, tmp_path):
    path, prob = problem
    out = tmp_path / "sol.json"
    main(["solve", "--input", str(path), "--out", str(out)])
    rep = json.loads(out.read_text())
    rep["entries"][0]["branches"] = [b * 1.01 for b in rep["entries"][0]["branches"]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(rep))
    assert main(["check", "--input", str(bad), "--out", str(tmp_path / "c2.json")]) == 3


def test_byte_determinism(problem, tmp_path):
    path, prob = problem
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    main(["solve", "--input", str(path), "--out", str(out1)])
    main(["solve", "--input", str(path), "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_flag_style_matches_input_style(problem, tmp_path):
    path, prob = problem
    lpath = tmp_path / "l.json"
    wpath = tmp_path / "w.json"
    lpath.write_text(json.dumps(prob["lengths"]))
    wpath.write_text(json.dumps(prob["weights"]))
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    main(["solve", "--input", str(path), "--out", str(out1)])
    main(["solve", "--n", "3", "--k", "0.0", "--lengths", str(lpath),
          "--weights", str(wpath), "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_svg_plot_written(problem, tmp_path):
    path, prob = problem
    svg = tmp_path / "trees.svg"
    main(["solve", "--input", str(path), "--out", str(tmp_path / "s.json"),
          "--plot", str(svg)])
    tree = ET.parse(svg)
    assert tree.getroot().tag.endswith("svg")


def test_invalid_input_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", "--input", str(bad)]) == 2
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"n": 3, "k": 0.0}))
    assert main(["solve", "--input", str(missing)]) == 2
    assert main(["solve", "--input", str(tmp_path / "nope.json")]) == 2


def test_infeasible_exit_3(tmp_path):
    prob = {"n": 2, "k": 1.0, "lengths": [2.0, 2.0, 2.0], "weights": [1, 1, 1]}
    p = tmp_path / "p.json"
    p.write_text(json.dumps(prob))
    # edges beyond the spherical convexity radius: infeasible to solve
    assert main(["solve", "--input", str(p)]) == 3


def test_classify_command(problem, tmp_path):
    path, prob = problem
    out = tmp_path / "cls.json"
    assert main(["classify", "--input", str(path), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["command"] == "classify"
    assert all("classification" in e for e in rep["entries"])


def test_invert_command(tmp_path):
    pts = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0],
           [0.5, math.sqrt(3) / 2, 0.0], [0.5, math.sqrt(3) / 6, math.sqrt(2.0 / 3.0)]]
    cen = list(np.mean(pts, axis=0))
    prob = {"n": 3, "k": 0.0, "points": pts, "a0": cen, "csum": 4.0}
    p = tmp_path / "inv.json"
    p.write_text(json.dumps(prob))
    out = tmp_path / "w.json"
    assert main(["invert", "--input", str(p), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert np.allclose(rep["weights"], 1.0, atol=1e-8)


def test_estimate_k_command(tmp_path, rng):
    space = CurvedSpace(0.5, 3)
    pts = random_model_points(rng, space, 4, lo=0.5, hi=1.1)
    lam = rng.dirichlet(np.ones(4) * 5.0)
    a0 = project_to_model((lam[:, None] * pts).sum(axis=0), space)
    edges = measure_edges(np.vstack([a0[None, :], pts]), space)
    prob = {"edges": edges.tolist(), "sign": "positive", "k_lo": 0.01, "k_hi": 3.0}
    p = tmp_path / "est.json"
    p.write_text(json.dumps(prob))
    out = tmp_path / "k.json"
    assert main(["estimate-k", "--input", str(p), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["status"] == "root-found"
    assert min(abs(r - 0.5) for r in rep["roots"]) <= 1e-6


def test_immerse_command(tmp_path, rng):
    space = CurvedSpace(1.0, 3)
    pts = random_model_points(rng, space, 4)
    lam = rng.dirichlet(np.ones(4) * 5.0)
    a0 = project_to_model((lam[:, None] * pts).sum(axis=0), space)
    edges = measure_edges(np.vstack([a0[None, :], pts]), space)
    prob = {"n": 3, "edges": edges.tolist(), "rho_lo": 0.4, "rho_hi": 10.0}
    p = tmp_path / "imm.json"
    p.write_text(json.dumps(prob))
    out = tmp_path / "rho.json"
    assert main(["immerse", "--input", str(p), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["rho0"] is not None and rep["rho0"] <= 1.0 + 1e-6


def test_limit_command(tmp_path):
    prob = {"triangle": [1.0, 1.2, 0.9], "b": [0.0, 0.0, 0.0], "c": [1.3, 0.9, 1.1],
            "m_values": [100.0, 10000.0]}
    p = tmp_path / "lim.json"
    p.write_text(json.dumps(prob))
    out = tmp_path / "scan.json"
    assert main(["limit", "--input", str(p), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert len(rep["scan"]) == 2
    assert "limit_weights" in rep
    assert sum(rep["limit_weights"]) == pytest.approx(1.0 + 1.3 + 0.9 + 1.1, rel=1e-12)


def test_threads_env_smoke(problem, tmp_path, monkeypatch):
    path, prob = problem
    monkeypatch.setenv("FERMAT_FRECHET_THREADS", "2")
    out = tmp_path / "t.json"
    assert main(["solve", "--input", str(path), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["count"] == len(rep["entries"])
