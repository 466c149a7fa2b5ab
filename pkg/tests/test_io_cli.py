import hashlib
import json

import numpy as np
import pytest
from hypothesis import given

from helpers import problems
from inflap import io
from inflap.cli import main
from inflap.graph import Graph


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


PATH_PROBLEM = {
    "graph": {"vertices": [0, 1, 2, 3, 4], "edges": [[0, 1], [1, 2], [2, 3], [3, 4]]},
    "X": [1, 2, 3],
    "g": {"0": 0, "4": 2},
    "f": {"1": 0, "2": 0, "3": 0},
}


# ---------------------------------------------------------------------- #
# serialization


def test_dumps_float_format():
    text = io.dumps({"b": 0.1, "a": [1, float("nan"), float("inf")], "c": np.float64(1 / 3)})
    assert text.index('"a"') < text.index('"b"')
    assert "0.10000000000000001" in text
    assert "0.33333333333333331" in text
    assert "null" in text and '"inf"' in text
    back = json.loads(text)
    assert back["c"] == 1 / 3


def test_graph_round_trip():
    g = Graph([0, 1, 2], [(0, 1), (1, 2)], complete={2: False}, labels={0: "root"})
    d = io.graph_to_dict(g)
    assert d == {"vertices": [0, 1, 2], "edges": [[0, 1], [1, 2]], "labels": {"0": "root"},
                 "incomplete": [2]}
    assert io.graph_to_dict(io.graph_from_dict(d)) == d


@given(problems(f_kind="any"))
def test_problem_round_trip(p):
    d = json.loads(io.dumps(io.problem_to_dict(p)))
    q = io.problem_from_dict(d)
    np.testing.assert_array_equal(q.interior, p.interior)
    np.testing.assert_array_equal(q.f, p.f)
    np.testing.assert_array_equal(q.g, p.g)
    assert json.loads(io.dumps(io.problem_to_dict(q))) == d


@pytest.mark.parametrize("bad", [
    {"X": [1]},
    {"graph": {"vertices": [0, 1]}, "X": [1]},
    {"graph": {"vertices": [0, 1, 2], "edges": [[0, 1], [1, 2]]}, "X": [1], "g": {"0": 0}},
    {"graph": {"vertices": [0, 1], "edges": [[0, 0]]}, "X": [1], "g": {"0": 0}},
])
def test_problem_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        io.problem_from_dict(bad)


def test_field_csv():
    g = Graph([3, 7], [(3, 7)])
    assert io.field_csv(g, np.array([0.5, 1 / 3])) == "id,value\n3,0.5\n7,0.33333333333333331\n"


def test_manifest_hashes_inputs():
    m = io.manifest("solve", {"problem": b"abc"}, {"tol": 1e-9}, seed=4)
    assert m["inputs"]["problem"] == hashlib.sha256(b"abc").hexdigest()
    assert m["seed"] == 4
    assert set(m["versions"]) == {"artifact", "python", "numpy", "scipy", "numba"}


# ---------------------------------------------------------------------- #
# solve


def test_cli_solve_path(tmp_path, capsys):
    src = write(tmp_path / "p.json", PATH_PROBLEM)
    out = tmp_path / "out"
    assert main(["solve", src, "--out", str(out)]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["outcome"]["converged"]
    assert res["verification"]["marching"]["checked"] == res["verification"]["marching"]["passed"] == 6
    assert res["verification"]["gradient_estimate"]["violations"] == 0
    rows = (out / "field.csv").read_text().splitlines()
    assert rows[0] == "id,value" and len(rows) == 6
    assert float(rows[3].split(",")[1]) == pytest.approx(1.0)
    assert {p.name for p in out.iterdir()} == {"outcome.json", "field.csv", "manifest.json"}


def test_cli_solve_sign_change_uniqueness(tmp_path, capsys):
    gal = tmp_path / "sc.json"
    assert main(["gallery", "sign_change", "--out", str(gal)]) == 0
    capsys.readouterr()
    assert main(["solve", str(gal), "--probe-uniqueness"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["uniqueness"]["kind"] == "distinct_solutions"
    assert res["uniqueness"]["gap"] == pytest.approx(2.0, abs=1e-8)


def test_cli_solve_infinite_width(tmp_path, capsys):
    prob = {"graph": {"vertices": [0, 1, 2, 3], "edges": [[0, 1], [2, 3]]}, "X": [2, 3],
            "g": {"0": 0, "1": 0}}
    assert main(["solve", write(tmp_path / "p.json", prob)]) == 2
    assert "finite width" in capsys.readouterr().err


def test_cli_solve_truncated_comb(tmp_path, capsys):
    gal = tmp_path / "comb.json"
    assert main(["gallery", "comb", "--param", "N_teeth=3", "--out", str(gal)]) == 0
    capsys.readouterr()
    assert main(["solve", str(gal)]) == 4
    assert "truncated" in capsys.readouterr().err


def test_cli_solve_not_converged(tmp_path, capsys):
    assert main(["solve", write(tmp_path / "p.json", PATH_PROBLEM), "--max-iters", "1"]) == 3


@pytest.mark.parametrize("content", ["{not json", json.dumps({"graph": {}})])
def test_cli_invalid_input(tmp_path, capsys, content):
    f = tmp_path / "bad.json"
    f.write_text(content)
    assert main(["solve", str(f)]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_cli_missing_file(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "nope.json")]) == 2


# ---------------------------------------------------------------------- #
# simulate


GAME = {
    "graph": {"vertices": [0, 1, 2], "edges": [[0, 1], [1, 2]]},
    "X": [1], "g": {"0": 0, "2": 1}, "r": {"1": 0}, "start": 1, "seed": 3,
}


def test_cli_simulate_fair_coin(tmp_path, capsys):
    assert main(["simulate", write(tmp_path / "g.json", GAME), "--n", "100000"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert abs(res["mean"] - 0.5) <= 0.01
    assert res["capped"] == 0 and res["n"] == 100000 and res["solver_value"] == 0.5


def test_cli_simulate_deterministic(tmp_path, capsys):
    src = write(tmp_path / "g.json", GAME)
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert main(["simulate", src, "--n", "5000", "--seed", "9", "--out", str(d)]) == 0
        outs.append({p.name: p.read_bytes() for p in d.iterdir()})
    assert outs[0] == outs[1]


def test_cli_simulate_capped_heavy(tmp_path, capsys):
    # a 6-cycle with one exit; player I circles, player II heads out
    edges = [[k, (k + 1) % 6] for k in range(6)] + [[0, 6]]
    game = {"graph": {"vertices": list(range(7)), "edges": edges}, "X": list(range(6)),
            "g": {"6": 1}, "start": 3, "max_rounds": 6,
            "strategies": {"I": {"kind": "scripted", "moves": {str(k): (k + 1) % 6 for k in range(6)}},
                           "II": {"kind": "toward_boundary"}}}
    assert main(["simulate", write(tmp_path / "g.json", game), "--n", "2000"]) == 0
    captured = capsys.readouterr()
    res = json.loads(captured.out)
    assert 0 < res["capped"] < 2000
    assert "warning" in captured.err


def test_cli_simulate_all_capped(tmp_path, capsys):
    game = dict(GAME, graph={"vertices": [0, 1, 2, 3], "edges": [[0, 1], [1, 2], [2, 3]]},
                X=[1, 2], g={"0": 0, "3": 1}, max_rounds=10,
                strategies={"I": {"kind": "scripted", "moves": {"1": 2, "2": 1}},
                            "II": {"kind": "scripted", "moves": {"1": 2, "2": 1}}})
    assert main(["simulate", write(tmp_path / "g.json", game), "--n", "50"]) == 3


def test_cli_simulate_strategy_fault(tmp_path, capsys):
    game = dict(GAME, strategies={"I": {"kind": "scripted", "moves": {"1": 1}},
                                  "II": {"kind": "scripted", "moves": {"1": 1}}})
    assert main(["simulate", write(tmp_path / "g.json", game), "--n", "10"]) == 2
    assert "round 0" in capsys.readouterr().err


# ---------------------------------------------------------------------- #
# converge and gallery


def test_cli_converge_interval(tmp_path, capsys):
    dom = {"shape": "box", "lo": [0.0], "hi": [1.0], "g": {"kind": "linear", "gradient": [1.0]},
           "eps_schedule": [0.2, 0.1, 0.05], "exact": {"kind": "linear", "gradient": [1.0]}}
    out = tmp_path / "conv"
    assert main(["converge", write(tmp_path / "d.json", dom), "--out", str(out)]) == 0
    res = json.loads(capsys.readouterr().out)
    err = [lv["error"] for lv in res["levels"]]
    assert err == sorted(err, reverse=True) and len(set(err)) == 3
    header = (out / "report.csv").read_text().splitlines()[0].split(",")
    assert "error" in header and "cauchy" in header


def test_cli_converge_without_exact(tmp_path, capsys):
    dom = {"shape": "box", "lo": [0.0], "hi": [1.0], "g": {"kind": "linear", "gradient": [1.0]}}
    out = tmp_path / "conv"
    assert main(["converge", write(tmp_path / "d.json", dom), "--eps-schedule", "0.2,0.1",
                 "--out", str(out)]) == 0
    res = json.loads(capsys.readouterr().out)
    assert "error" not in res["levels"][0]
    assert res["cauchy"][1] is not None
    header = (out / "report.csv").read_text().splitlines()[0].split(",")
    assert "error" not in header and "cauchy" in header


def test_cli_converge_annulus_cone(tmp_path, capsys):
    cone = {"kind": "cone", "a": 0.0, "b": 1.0, "apex": [0.0, 0.0]}
    dom = {"shape": "annulus", "r_in": 0.25, "r_out": 1.0, "g": cone, "exact": cone,
           "eps_schedule": [0.5, 0.35, 0.25], "h_divisor": 10}
    assert main(["converge", write(tmp_path / "d.json", dom)]) == 0
    err = [lv["error"] for lv in json.loads(capsys.readouterr().out)["levels"]]
    assert err[0] > err[1] > err[2]


def test_cli_converge_bad_schedule(tmp_path, capsys):
    dom = {"shape": "box", "lo": [0.0], "hi": [1.0]}
    assert main(["converge", write(tmp_path / "d.json", dom), "--eps-schedule", "0.1,0.2"]) == 2


@pytest.mark.parametrize("name, key", [
    ("sign_change", "problem"), ("doubling", "problem"), ("comb", "problem"),
    ("cca", "center"), ("nonexistence", "rows"),
])
def test_cli_gallery(capsys, name, key):
    assert main(["gallery", name]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["name"] == name and key in res


def test_cli_gallery_params(capsys):
    assert main(["gallery", "cca", "--param", "a=0.5", "--param", "half_width=5"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["fields"]["u"][str(res["center"])] == 0.5
    assert main(["gallery", "cca", "--param", "a=2"]) == 2
    assert main(["gallery", "cca", "--param", "colour=1"]) == 2
