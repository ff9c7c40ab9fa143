import csv
import json
import math

import numpy as np
import pytest

from mcvd_duo import __version__
from mcvd_duo.cli import main, parse_grid


def scenario_file(tmp_path, name="sc.json", **doc):
    base = {"diffusion_coeff": 100.0, "far_radius": 5.0, "pos1": [30, 0, 0], "pos2": [30, 15, 0]}
    base.update(doc)
    path = tmp_path / name
    path.write_text(json.dumps(base))
    return str(path)


def read(path):
    lines = open(path).read().splitlines()
    rows = list(csv.DictReader(lines[1:]))
    return lines[0], rows


def run(tmp_path, *args, out="out.csv"):
    target = str(tmp_path / out)
    code = main([*args, "--out", target])
    return code, target


def test_parse_grid_forms():
    assert list(parse_grid("1,2,5")) == [1.0, 2.0, 5.0]
    np.testing.assert_allclose(parse_grid("lin:0:1:5"), np.linspace(0, 1, 5))
    np.testing.assert_allclose(parse_grid("log:0.1:10:3"), [0.1, 1.0, 10.0])
    np.testing.assert_allclose(parse_grid(None, [3, 4]), [3.0, 4.0])


def test_hit_columns_and_comment(tmp_path):
    sc = scenario_file(tmp_path)
    code, out = run(tmp_path, "hit", "--scenario", sc, "--t-grid", "5,10,15,20")
    assert code == 0
    comment, rows = read(out)
    assert comment.startswith(f"# mcvd-duo {__version__}")
    assert "scenario_sha256=" in comment and "seed=" in comment
    assert list(rows[0]) == ["t", "p1_far1", "p1_far2", "p2_far1", "p2_far2", "p_total"]
    gaps = [float(r["p1_far2"]) - float(r["p2_far2"]) for r in rows]
    assert all(g > 0 for g in gaps) and np.all(np.diff(gaps) > 0)


def test_far_apart_hit(tmp_path):
    sc = scenario_file(tmp_path, pos1=[-30, -10, 0], pos2=[100, 40, 0])
    code, out = run(tmp_path, "hit", "--scenario", sc, "--t-grid", "20")
    row = read(out)[1][0]
    assert code == 0
    assert abs(float(row["p1_far1"]) - float(row["p2_far1"])) <= 0.005


@pytest.mark.parametrize("grid", ["", "lin:0:1:0"])
def test_empty_grid_is_usage_error(tmp_path, grid):
    sc = scenario_file(tmp_path)
    code, _ = run(tmp_path, "hit", "--scenario", sc, "--t-grid", grid)
    assert code == 2


def test_schema_errors(tmp_path):
    code, _ = run(tmp_path, "hit", "--scenario", scenario_file(tmp_path, colour="red"), "--t-grid", "1")
    assert code == 2
    code, _ = run(tmp_path, "hit", "--scenario", scenario_file(tmp_path, far_radius=-1), "--t-grid", "1")
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(tmp_path, "hit", "--scenario", str(bad), "--t-grid", "1")[0] == 2
    assert run(tmp_path, "hit", "--scenario", str(tmp_path / "missing.json"), "--t-grid", "1")[0] == 2


def test_overlap_is_geometry_error(tmp_path):
    sc = scenario_file(tmp_path, pos2=[30, 8, 0])
    code, _ = run(tmp_path, "hit", "--scenario", sc, "--t-grid", "1")
    assert code == 3


def test_sweep_angle(tmp_path):
    sc = scenario_file(tmp_path, pos1=[20, 0, 0], pos2=[0, 20, 0])
    code, out = run(tmp_path, "sweep-angle", "--scenario", sc, "--t", "10",
                    "--phi-grid", "20,25,30,34,60,81,90,120,150,165,180")
    assert code == 0
    _, rows = read(out)
    assert [r["status"] for r in rows[:2]] == ["overlap", "overlap"]
    ok = [r for r in rows if r["status"] == "ok"]
    for r in ok:
        assert r["p2_far1"] == r["p2_far2"]
        assert float(r["p_total"]) == 2 * float(r["p2_far1"])
    totals = [float(r["p_total"]) for r in ok]
    assert float(ok[int(np.argmax(totals))]["phi_deg"]) == 180.0
    assert float(rows[-1]["R"]) == pytest.approx(40.0)


def test_sweep_angle_minimum(tmp_path):
    sc = scenario_file(tmp_path, pos1=[20, 0, 0], pos2=[0, 20, 0])
    code, _ = run(tmp_path, "sweep-angle", "--scenario", sc, "--t", "10", "--phi-grid", "10,90")
    assert code == 2


def test_gain(tmp_path):
    sc = scenario_file(tmp_path, pos1=[25, 0, 0], pos2=[-25, 0, 0])
    code, out = run(tmp_path, "gain", "--scenario", sc, "--t-grid", "log:0.1:10000:41")
    assert code == 0
    _, rows = read(out)
    assert list(rows[0]) == ["t", "p1_single", "p_total_two", "gain", "bound_small_t", "gain_infinity"]
    g = np.array([float(r["gain"]) for r in rows])
    assert g[0] < 1 < g[-1]
    assert np.all(g < math.sqrt(2))
    assert float(rows[0]["gain_infinity"]) == pytest.approx(1.314, abs=1e-3)


def test_auc_zero_molecules(tmp_path):
    sc = scenario_file(tmp_path, pos1=[20, 5, 0], pos2=[-25, -10, 0], slot_duration=5.0,
                       noise_mean=5.0, noise_var=5.0)
    code, out = run(tmp_path, "auc", "--scenario", sc, "--sweep", "N", "--grid", "0",
                    "--trials", "20000")
    assert code == 0
    row = read(out)[1][0]
    for key, value in row.items():
        if key.startswith("auc"):
            assert float(value) == pytest.approx(0.5, abs=0.02), key


def test_auc_distance_symmetry(tmp_path):
    sc = scenario_file(tmp_path, pos1=[-10, 0, 0], pos2=[10, 0, 0], noise_mean=5.0, noise_var=5.0)
    code, out = run(tmp_path, "auc", "--scenario", sc, "--sweep", "R", "--grid", "8,20,40",
                    "--mode", "closed")
    assert code == 0
    _, rows = read(out)
    assert rows[0]["status"] == "overlap"
    eq = rows[1]
    assert eq["auc1_closed"] == eq["auc2_closed"]
    assert "auc1_mc" not in eq


def test_validate_exit_codes(tmp_path):
    sc = scenario_file(tmp_path, pos1=[20, 5, 0], pos2=[-25, -10, 0], slot_duration=5.0,
                       noise_mean=5.0, noise_var=5.0,
                       sim={"n_particles": 4000, "t_max": 2.0, "seed": 1})
    code, out = run(tmp_path, "validate", "--scenario", sc, "--tol", "0.05", "--trials", "20000",
                    out="report.json")
    report = json.load(open(out))
    assert code == 0 and report["passed"]
    assert {c["name"] for c in report["checks"]} >= {"particle_agreement", "eventual_identity",
                                                     "tap_conservation_far1", "link_stats"}
    code, out = run(tmp_path, "validate", "--scenario", sc, "--tol", "0", "--trials", "20000",
                    out="report.json")
    assert code == 4
    assert not json.load(open(out))["passed"]


def test_error_map(tmp_path):
    sc = scenario_file(tmp_path, far_radius=3.0, pos1=[9, 0, 0], pos2=[0, 9, 0])
    code, out = run(tmp_path, "error-map", "--scenario", sc, "--xs", "9,-9", "--ys", "2,9",
                    "--particles", "500", "--t-max", "1", "--seed", "3")
    assert code == 0
    comment, rows = read(out)
    assert "seed=3" in comment
    assert len(rows) == 4
    assert rows[0]["status"] == "skipped"


def test_outputs_byte_identical(tmp_path):
    sc = scenario_file(tmp_path, noise_mean=5.0, noise_var=5.0)
    args = ["auc", "--scenario", sc, "--sweep", "N", "--grid", "100,500", "--trials", "5000",
            "--seed", "7"]
    _, first = run(tmp_path, *args, out="a.csv")
    _, second = run(tmp_path, *args, out="b.csv")
    assert open(first, "rb").read() == open(second, "rb").read()
    assert "seed=7" in open(first).readline()
