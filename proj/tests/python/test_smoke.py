import json
import math

import numpy as np
import pytest

import qgdirac


def test_builtin_graph_summary():
    s = qgdirac.graph_summary("pendant_loop")
    assert s["half_lines"] == 3
    assert s["edge_count"] == 10
    assert s["core_length"] == pytest.approx(5 + math.sqrt(2) + math.pi)


def test_graph_json_round_trip():
    spec = json.loads(qgdirac.graph_json("line"))
    assert len(spec["edges"]) == 3


def test_unknown_graph_raises():
    with pytest.raises(qgdirac.QgdiracError, match="InvalidConfig"):
        qgdirac.graph_summary("no_such_graph")


def test_spectrum_has_gap():
    m, c = 1.0, 5.0
    nu = qgdirac.dirac_spectrum("star3", m=m, c=c, h=0.05, L=1.0)
    assert isinstance(nu, np.ndarray)
    assert np.all(np.diff(nu) >= 0)
    assert np.min(np.abs(nu)) >= m * c * c * (1 - 1e-8)


def test_nlse_line():
    s = qgdirac.solve_nlse("line", m=1.0, p=3.0, h=0.02, L=20.0)
    assert s["lambda"] < 0
    assert s["mass"] == pytest.approx(1.0, abs=1e-12)
    assert s["residual"] < 1e-8
    assert np.all(s["g"] >= -1e-14)


def test_nlse_rejects_missing_decay():
    with pytest.raises(qgdirac.QgdiracError, match="NoDecay"):
        qgdirac.solve_nlse("line", m=1.0, p=4.0, h=0.02, L=20.0)


def test_nlde_below_rest_energy():
    out = qgdirac.solve_nlde("line", m=1.0, p=3.0, c_list=[10.0, 20.0], h=0.02, L=20.0)
    assert [s["c"] for s in out] == [10.0, 20.0]
    for s in out:
        assert 0 < s["omega"] < s["c"] ** 2
        assert s["residual"] <= 1e-10


def test_sweep_csv_header():
    cfg = {"graph": "line", "m": 1, "p": 3, "c_list": [5, 10, 20], "h": 0.05, "trunc_length": 20,
           "seed": 0, "out_dir": "."}
    r = qgdirac.run_sweep(json.dumps(cfg))
    assert not r["failed"]
    assert len(r["rows"]) == 3
    assert r["csv"].splitlines()[0].startswith("c,omega,omega_minus_mc2")


def test_level_estimate_below_sine_bound():
    e = qgdirac.estimate_ec("line", c=50.0, p=4.0, family="sine", h=0.02, L=1.0)
    assert e["half_rest_energy"] < e["estimate"] <= e["bound"] + 0.1


def test_inequalities_hold():
    r = qgdirac.check_inequalities("line", samples=100, h=0.05)
    for key in ("support", "form", "sobolev", "sup", "monotone", "projector"):
        assert r[key]["violations"] == 0, key


def test_scaling_helpers():
    m, p = 1.5, 3.0
    assert qgdirac.scaled_mass(m, p) == pytest.approx(qgdirac.coefficient_scale(m, p) ** 2)
    assert qgdirac.m0_threshold(3.0, 1.0) == 0.0
    n, core, a = 2, 1.0, 1.5
    assert qgdirac.tent_derivative_norm2(n, core, a) == pytest.approx(n * a / (n / (3 * a) + core))
