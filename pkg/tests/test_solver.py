import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import problems, random_problem
from inflap import (DirichletProblem, PreconditionError, TruncationError, barrier_envelope,
                    barrier_field, is_subsolution, is_supersolution, residual, solve,
                    solve_exact_amle, sweep, uniqueness_probe)
from inflap.gallery import doubling_graph, sign_change_example
from inflap.graph import Graph, path_graph, random_tree


def test_sweep_fixed_point():
    p = DirichletProblem.build(path_graph(5), [1, 2, 3], 0.0, {0: 0.0, 4: 2.0})
    u = np.arange(5) / 2
    np.testing.assert_array_equal(sweep(p, u), u)


@pytest.mark.parametrize(
    "g, f, expected",
    [({0: 0.0, 2: 1.0}, 0.0, 0.5), ({0: 0.0, 2: 0.0}, {1: -2.0}, 1.0)],
)
def test_sweep_single_step(g, f, expected):
    p = DirichletProblem.build(path_graph(3), [1], f, g)
    out = sweep(p, np.zeros(3))
    assert out[1] == expected
    assert out[0] == g[0] and out[2] == g[2]


@given(problems(f_kind="any"), st.integers(0, 2**32 - 1))
def test_sweep_monotone_and_nonexpansive(p, seed):
    rng = np.random.default_rng(seed)
    u = rng.normal(size=p.graph.n) * 3
    v = u - rng.uniform(0, 2, size=p.graph.n)
    su, sv = sweep(p, u), sweep(p, v)
    assert np.all(su >= sv - 1e-12)
    w = rng.normal(size=p.graph.n) * 3
    sw = sweep(p, w)
    X = p.interior
    assert np.max(np.abs(su - sw)[X]) <= np.max(np.abs(u - w)) + 1e-12


@given(problems(f_kind="any"))
def test_sweep_fixes_solutions(p):
    out = solve(p, tol=1e-12)
    np.testing.assert_allclose(sweep(p, out.u), out.u, atol=1e-11)


def test_solve_linear_path():
    p = DirichletProblem.build(path_graph(5), [1, 2, 3], 0.0, {0: 0.0, 4: 2.0})
    out = solve(p)
    assert out.converged and out.residual <= 1e-9
    np.testing.assert_allclose(out.u, np.arange(5) / 2, atol=1e-9)
    assert out.summary()["converged"] is True


def test_solve_single_interior():
    p = DirichletProblem.build(path_graph(3), [1], {1: -2.0}, 0.0)
    assert solve(p).u[1] == pytest.approx(1.0, abs=1e-12)


def test_solve_sign_change_gives_a_solution():
    ex = sign_change_example()
    out = solve(ex.problem, tol=1e-12)
    assert out.converged and out.residual <= 1e-9
    # some member of the family u + a 1_X
    shift = out.u[ex.problem.interior] - ex.u[ex.problem.interior]
    assert np.ptp(shift) < 1e-9 and -1 - 1e-9 <= shift[0] <= 1 + 1e-9


@pytest.mark.parametrize("init", ["upper", "lower"])
def test_schemes_agree(init):
    p = random_problem(np.random.default_rng(3), 30, f_kind="any")
    a = solve(p, init, tol=1e-12)
    b = solve(p, init, tol=1e-12, scheme="gauss_seidel")
    assert a.converged and b.converged
    np.testing.assert_allclose(a.u, b.u, atol=1e-9)
    assert b.iterations <= a.iterations


@given(problems(f_kind="any"), st.sampled_from(["upper", "lower"]))
def test_barrier_iterates_are_monotone(p, init):
    out = solve(p, init, tol=1e-12, debug=True)
    assert out.converged
    assert out.monotone_violation is None


@given(problems(f_kind="any"))
def test_envelopes_bracket_solution(p):
    up = barrier_envelope(p, "upper")
    lo = barrier_envelope(p, "lower")
    assert is_supersolution(p, up) and is_subsolution(p, lo)
    u = solve(p, tol=1e-12).u
    assert np.all(lo <= u + 1e-9) and np.all(u <= up + 1e-9)


@given(problems(f_kind="any"), st.data())
def test_envelope_below_each_anchored_barrier(p, data):
    y0 = int(data.draw(st.sampled_from(p.graph.ids[p.boundary].tolist())))
    bar = barrier_field(p, y0, c=p.f_norm, R=1, side="upper")
    assert np.all(barrier_envelope(p, "upper") <= bar.values + 1e-9)


def test_max_iters_reports_not_converged():
    p = DirichletProblem.build(path_graph(40), range(1, 39), 0.0, {0: 0.0, 39: 1.0})
    out = solve(p, max_iters=5)
    assert not out.converged
    assert out.iterations == 5 and out.history.size == 5


def test_infinite_width_refused():
    g = Graph([0, 1, 2, 3], [(0, 1), (2, 3)])
    p = DirichletProblem.build(g, [2, 3], 0.0, 0.0)
    with pytest.raises(PreconditionError, match="infinite width"):
        solve(p)


def test_truncated_interior_refused():
    dg = doubling_graph(16)
    with pytest.raises((PreconditionError, TruncationError)):
        solve(dg.problem)


def test_custom_init():
    p = DirichletProblem.build(path_graph(5), [1, 2, 3], 0.0, {0: 0.0, 4: 2.0})
    out = solve(p, np.full(5, 7.0), tol=1e-12)
    assert out.init == "custom" and out.converged
    np.testing.assert_allclose(out.u, np.arange(5) / 2, atol=1e-10)


# ---------------------------------------------------------------------- #
# steepest-path oracle


def test_amle_path():
    p = DirichletProblem.build(path_graph(5), [1, 2, 3], 0.0, {0: 0.0, 4: 2.0})
    np.testing.assert_allclose(solve_exact_amle(p), [0, 0.5, 1, 1.5, 2])


def test_amle_constant_boundary():
    p = random_problem(np.random.default_rng(1), 20).with_data(g=2.5)
    np.testing.assert_allclose(solve_exact_amle(p), 2.5)


def test_amle_requires_zero_f():
    p = DirichletProblem.build(path_graph(3), [1], {1: 1.0}, 0.0)
    with pytest.raises(PreconditionError):
        solve_exact_amle(p)


@pytest.mark.parametrize("seed", range(8))
def test_amle_matches_solver_on_trees(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 51))
    g = random_tree(n, rng)
    leaves = np.flatnonzero(g.degree == 1)
    X = np.setdiff1d(np.arange(n), leaves)
    if X.size == 0:
        pytest.skip("tree without interior")
    p = DirichletProblem.build(g, X, 0.0, rng.uniform(-1, 1, n))
    exact = solve_exact_amle(p)
    assert residual(p, exact).sup_norm <= 1e-12
    np.testing.assert_allclose(solve(p, tol=1e-12).u, exact, atol=1e-8)


@given(problems(n_max=25))
def test_amle_is_a_solution(p):
    assert residual(p, solve_exact_amle(p)).sup_norm <= 1e-10


# ---------------------------------------------------------------------- #
# uniqueness probe


@given(problems(f_kind="nonneg"))
def test_one_signed_f_is_unique(p):
    rep = uniqueness_probe(p)
    assert rep.gap <= 1e-8 and rep.kind == "unique_evidence"


def test_sign_change_gap_two():
    ex = sign_change_example()
    rep = uniqueness_probe(ex.problem)
    assert rep.kind == "distinct_solutions"
    assert rep.gap == pytest.approx(2.0, abs=1e-8)
    np.testing.assert_allclose(rep.u_hi, ex.shifted(1.0), atol=1e-9)
    np.testing.assert_allclose(rep.u_lo, ex.shifted(-1.0), atol=1e-9)


def test_constant_data_gap_zero():
    p = random_problem(np.random.default_rng(5), 15).with_data(g=-0.75)
    rep = uniqueness_probe(p)
    assert rep.gap <= 1e-10
    np.testing.assert_allclose(rep.u_hi, -0.75)
