import math

import numpy as np
import pytest

from inflap import DomainError, InputError
from inflap.euclid import (DomainSpec, FunctionSpec, build_eps_graph, convergence_run,
                           intrinsic_distance, pairs_within, sample_domain, uniform_bound,
                           uniform_bound_check)
from inflap.graph import bfs_levels
from inflap.solver import solve

INTERVAL = DomainSpec("box", {"lo": [0.0], "hi": [1.0]}, g=FunctionSpec("linear", {"gradient": [1.0]}))
SQUARE = DomainSpec("box", {"lo": [0.0, 0.0], "hi": [1.0, 1.0]})


def nearest(sample, pt):
    return int(np.argmin(np.linalg.norm(sample.points - np.asarray(pt, float), axis=1)))


# ---------------------------------------------------------------------- #
# functions and specs


@pytest.mark.parametrize(
    "spec, pts, expected",
    [
        (FunctionSpec.constant(2.0), [[0.0, 1.0]], [2.0]),
        (FunctionSpec("linear", {"offset": 1.0, "gradient": [2.0, -1.0]}), [[1.0, 1.0]], [2.0]),
        (FunctionSpec("cone", {"a": 1.0, "b": 2.0, "apex": [0.0, 0.0]}), [[3.0, 4.0]], [11.0]),
        (FunctionSpec("poly1d", {"coeffs": [-1, 1, 0]}), [[0.5]], [0.25]),
        (FunctionSpec("table", {"x": [0, 1], "values": [0, 10]}), [[0.25]], [2.5]),
    ],
)
def test_function_catalog(spec, pts, expected):
    np.testing.assert_allclose(spec(np.array(pts)), expected)


def test_function_from_dict():
    assert FunctionSpec.from_dict(3) == FunctionSpec.constant(3)
    f = FunctionSpec.from_dict({"kind": "cone", "a": 0, "b": 1})
    assert f.as_dict() == {"kind": "cone", "a": 0, "b": 1}
    with pytest.raises(InputError):
        FunctionSpec("sine")


def test_domain_spec_validation():
    with pytest.raises(InputError):
        DomainSpec("sphere", {})
    with pytest.raises(InputError):
        DomainSpec("annulus", {"r_in": 1.0})
    with pytest.raises(InputError):
        DomainSpec("annulus", {"r_in": 2.0, "r_out": 1.0})
    d = DomainSpec.from_dict({"shape": "annulus", "r_in": 1, "r_out": 2, "g": 1.5})
    assert d.g(np.zeros((1, 2)))[0] == 1.5
    assert DomainSpec.from_dict(d.as_dict()).as_dict() == d.as_dict()


# ---------------------------------------------------------------------- #
# sampling and distances


def test_sample_unit_square_counts():
    s = sample_domain(SQUARE, 0.25)
    assert s.interior.sum() == 9 and s.is_boundary.sum() == 16


def test_sample_interval_counts():
    s = sample_domain(INTERVAL, 0.1)
    assert s.interior.sum() == 9 and s.is_boundary.sum() == 2
    assert s.width == pytest.approx(0.5)


def test_sample_annulus_width():
    s = sample_domain(DomainSpec("annulus", {"r_in": 1.0, "r_out": 2.0}), 0.1)
    assert abs(s.width - 0.5) <= 2 * 0.1
    assert s.omega_r(0.4).sum() < s.omega_r(0.1).sum() < s.interior.sum()


def test_sample_rejects_bad_h():
    with pytest.raises(InputError):
        sample_domain(SQUARE, 0.0)


def test_square_diagonal():
    s = sample_domain(SQUARE, 0.05)
    a, b = nearest(s, [0, 0]), nearest(s, [1, 1])
    assert intrinsic_distance(s, a, b) == pytest.approx(math.sqrt(2))
    grid = intrinsic_distance(s, a, b, method="grid")
    assert math.sqrt(2) <= grid <= 1.04 * math.sqrt(2)
    assert intrinsic_distance(s, a, a) == 0.0


def test_l_shape_geodesic():
    s = sample_domain(DomainSpec("l_shape", {"size": 2.0, "notch": 1.0}), 0.05)
    a, b = nearest(s, [1.5, 0.75]), nearest(s, [0.75, 1.5])
    pa, pb = s.points[a], s.points[b]
    corner = np.array([1.0, 1.0])
    two_segment = np.linalg.norm(pa - corner) + np.linalg.norm(corner - pb)
    d = intrinsic_distance(s, a, b)
    assert d > np.linalg.norm(pa - pb)
    assert abs(d - two_segment) <= 0.04 * two_segment
    with pytest.raises(DomainError):
        intrinsic_distance(s, a, b, method="segment")


def test_pairs_within_strict():
    s = sample_domain(INTERVAL, 0.05)
    i, j, d = pairs_within(s, 0.1)
    assert np.all(d < 0.1)
    # grid neighbors at exactly 0.1 are excluded
    x = s.points[:, 0]
    assert not np.any(np.isclose(np.abs(x[i] - x[j]), 0.1))


@pytest.mark.parametrize("shape, params", [
    ("slab_between_graphs", {"period": 2.0, "x": [0.0, 1.0], "lower": [0.0, 0.2], "upper": [1.0, 1.3]}),
    ("punctured_box", {"spacing": 1.0, "cells": 2}),
])
def test_periodic_shapes_have_finite_width(shape, params):
    s = sample_domain(DomainSpec(shape, params), 0.1)
    assert np.isfinite(s.width) and s.width < 1.0
    bundle = build_eps_graph(s, 1.0, g=FunctionSpec.constant(1.0), f=FunctionSpec.constant(-1.0),
                             hop_check=False)
    out = solve(bundle.problem, tol=1e-10)
    assert out.converged
    assert uniform_bound_check(bundle, out)


# ---------------------------------------------------------------------- #
# eps-graphs


def test_eps_graph_interval_adjacency_and_hops():
    s = sample_domain(INTERVAL, 0.01)
    b = build_eps_graph(s, 0.2, hop_check=False)
    a, c = nearest(s, [0.3]), nearest(s, [0.45])
    assert c in b.graph.neighbors(a)
    b = build_eps_graph(s, 0.1, hop_check=False)
    a, c = nearest(s, [0.3]), nearest(s, [0.65])
    hops = bfs_levels(b.graph, np.array([a]))[c]
    assert hops == math.floor(0.35 / 0.1) + 1 == 4
    assert b.W_i == math.floor(0.5 / 0.1) + 1 == 6
    assert b.graph_width <= b.W_i


def test_eps_graph_requires_fine_sample():
    s = sample_domain(INTERVAL, 0.05)
    with pytest.raises(InputError):
        build_eps_graph(s, 0.2)


def test_eps_graph_rhs_scaling():
    spec = DomainSpec("box", {"lo": [0.0], "hi": [1.0]}, f=FunctionSpec.constant(3.0))
    s = sample_domain(spec, 0.01)
    b = build_eps_graph(s, 0.1, hop_check=False)
    assert np.allclose(b.problem.f[s.interior], 0.03)
    b = build_eps_graph(s, 0.1, rhs_sign=-1, hop_check=False)
    assert np.allclose(b.problem.f[s.interior], -0.03)


def test_hop_check_reported():
    s = sample_domain(SQUARE, 0.02)
    b = build_eps_graph(s, 0.2)
    hc = b.hop_check
    assert hc["pairs"] > 0
    assert hc["exact_fraction"] > 0.9 and hc["max_abs_deviation"] <= 1


def test_uniform_bound():
    s = sample_domain(INTERVAL, 0.01)
    b = build_eps_graph(s, 0.1, hop_check=False)
    assert uniform_bound(b) == pytest.approx(1.0)
    u = solve(b.problem, tol=1e-10).u
    assert uniform_bound_check(b, u)
    bad = u.copy()
    bad[nearest(s, [0.5])] = 5.0
    assert not uniform_bound_check(b, bad)


def test_uniform_bound_inhomogeneous():
    spec = DomainSpec("box", {"lo": [0.0], "hi": [1.0]}, f=FunctionSpec.constant(-2.0))
    s = sample_domain(spec, 0.01)
    b = build_eps_graph(s, 0.1, hop_check=False)
    u = solve(b.problem, tol=1e-10).u
    c = 2 * 0.01
    r = np.arange(b.W_i + 1)
    assert uniform_bound(b) == pytest.approx(np.max(b.W_i * c * r - c * r * (r - 1) / 2))
    assert uniform_bound_check(b, u)


# ---------------------------------------------------------------------- #
# convergence runs


def test_convergence_interval_linear():
    rep = convergence_run(INTERVAL, [0.2, 0.1, 0.05], exact=FunctionSpec("linear", {"gradient": [1.0]}),
                          r_grid=[0.1])
    assert len(rep.ok_levels()) == 3
    for eps, err in zip(rep.eps, rep.column("error")):
        assert err <= 2 * eps
    assert rep.cauchy[0] is None and all(c is not None for c in rep.cauchy[1:])
    assert all(rep.column("bound_ok"))
    cols, rows = rep.table_rows()
    assert cols[0] == "eps" and len(rows) == 3


def test_convergence_without_exact():
    rep = convergence_run(SQUARE, [0.4, 0.3], r_grid=[0.1])
    assert all("error" not in lv for lv in rep.levels)
    assert rep.cauchy[1] is not None
    lv = rep.levels[0]
    assert set(lv["boundary"]) == {"0.3", "0.4", "eps"}
    # entries with delta above eps are not enumerated
    assert rep.levels[1]["boundary"]["0.4"] is None


def test_convergence_schedule_validation():
    with pytest.raises(InputError):
        convergence_run(INTERVAL, [0.1, 0.2])
    with pytest.raises(InputError):
        convergence_run(INTERVAL, [0.1], h_rule=lambda e: e / 5)


def test_convergence_failure_recorded():
    rep = convergence_run(SQUARE, [0.4, 0.2], max_samples=3000)
    assert "failure" not in rep.levels[0]
    assert "exceed the cap" in rep.levels[1]["failure"]
    assert rep.cauchy[1] is None
