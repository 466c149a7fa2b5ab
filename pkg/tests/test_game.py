import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import random_problem
from inflap import InputError, TruncationError, solve, uniqueness_probe
from inflap.game import (EstimationError, GameConfig, GreedyMax, GreedyMin, Scripted,
                         StrategyFault, TowardBoundary, coin_flips, dpp_check, estimate_value,
                         play_game)
from inflap.gallery import doubling_graph
from inflap.graph import Graph, grid_graph, path_graph


def path_game(n=3, g_end=1.0, r=0.0, start=None):
    start = (n - 1) // 2 if start is None else start
    return GameConfig.build(path_graph(n), range(1, n - 1), r, {0: 0.0, n - 1: g_end}, start)


def test_coin_flips_deterministic_and_fair():
    a = coin_flips(7, np.arange(20000)[:, None], np.arange(5)[None, :])
    b = coin_flips(7, np.arange(20000)[:, None], np.arange(5)[None, :])
    np.testing.assert_array_equal(a, b)
    assert a.shape == (20000, 5)
    assert abs(a.mean() - 0.5) < 0.01
    assert not np.array_equal(a, coin_flips(8, np.arange(20000)[:, None], np.arange(5)[None, :]))


def test_coin_flip_matches_elementwise():
    grid = coin_flips(3, np.arange(4)[:, None], np.arange(6)[None, :])
    for k in range(4):
        for t in range(6):
            assert grid[k, t] == coin_flips(3, k, t)[0]


@pytest.mark.parametrize("s1, s2", [(GreedyMax, GreedyMin), (GreedyMin, GreedyMax)])
def test_length_two_path_one_round(s1, s2):
    cfg = path_game(3)
    u = np.array([0.0, 0.5, 1.0])
    for seed in range(10):
        tr = play_game(cfg, s1(u), s2(u), seed)
        assert tr.rounds == 1 and not tr.capped
        assert tr.terminal == (2 if (tr.coins[0] == (s1 is GreedyMax)) else 0)


def test_toward_boundary_bounded_rounds():
    cfg = GameConfig.build(grid_graph(7, 7), [i * 7 + j for i in range(1, 6) for j in range(1, 6)],
                           0.0, 0.0, start=24)
    d = cfg.boundary_distance()[cfg.start_pos]
    for seed in range(20):
        tr = play_game(cfg, TowardBoundary(), TowardBoundary(), seed)
        assert tr.rounds == d == 3


def test_transcript_reproducible():
    cfg = path_game(9, start=4)
    moves_up = {k: k + 1 for k in range(1, 8)}
    moves_down = {k: k - 1 for k in range(1, 8)}
    a = play_game(cfg, Scripted(moves_up), Scripted(moves_down), seed=11)
    b = play_game(cfg, Scripted(moves_up), Scripted(moves_down), seed=11)
    assert a.as_dict() == b.as_dict()
    # the walk is driven by the coins
    pos = 4
    for c in a.coins:
        pos += 1 if c else -1
    assert pos == a.terminal


def test_strategy_fault_names_round():
    cfg = path_game(5, start=2)
    bad = Scripted({2: 4, 1: 3, 3: 1})
    with pytest.raises(StrategyFault, match="round 0"):
        play_game(cfg, bad, bad, seed=0)
    with pytest.raises(StrategyFault, match="round 0"):
        estimate_value(cfg, bad, bad, 10, seed=0)


def test_estimate_one_fair_coin():
    cfg = path_game(3)
    u = np.array([0.0, 0.5, 1.0])
    est = estimate_value(cfg, GreedyMax(u), GreedyMin(u), 10**5, seed=1)
    assert est.capped == 0
    assert abs(est.mean - 0.5) <= 3 * est.stderr


@pytest.mark.parametrize("c", [2.5, -1.0, 0.0])
def test_one_round_running_payoff(c):
    cfg = GameConfig.build(path_graph(3), [1], {1: c}, 0.0, 1)
    u = solve(cfg.problem()).u
    est = estimate_value(cfg, GreedyMax(u), GreedyMin(u), 1000, seed=0)
    assert est.mean == c and est.stderr == 0.0


def test_estimate_path_four_against_solver():
    cfg = path_game(5, start=2)
    u = solve(cfg.problem(), tol=1e-12).u
    assert u[2] == pytest.approx(0.5)
    est = estimate_value(cfg, GreedyMax(u), GreedyMin(u), 10**5, seed=2)
    assert abs(est.mean - u[2]) <= 4 * est.stderr


def test_vectorized_matches_transcripts():
    cfg = GameConfig.build(path_graph(7), range(1, 6), lambda k: {2: 0.3, 4: -0.1}.get(k, 0.0), {0: 0.0, 6: 1.0}, 3)
    u = solve(cfg.problem(), tol=1e-12).u
    s1, s2 = GreedyMax(u), GreedyMin(u)
    est = estimate_value(cfg, s1, s2, 200, seed=5)
    pays = [play_game(cfg, s1, s2, 5, k).payoff for k in range(200)]
    assert est.mean == pytest.approx(np.mean(pays), abs=1e-12)


def test_capped_games_excluded():
    # both players bounce between 1 and 2 and never reach the ends
    cfg = GameConfig.build(path_graph(4), [1, 2], 1.0, 0.0, 1, max_rounds=50)
    swap = Scripted({1: 2, 2: 1})
    with pytest.raises(EstimationError):
        estimate_value(cfg, swap, swap, 20, seed=0)
    tr = play_game(cfg, swap, swap, seed=0)
    assert tr.capped and tr.payoff is None and tr.recompute_payoff(cfg) is None
    # mixing with an exit strategy yields some finished games
    est = estimate_value(cfg, swap, Scripted({1: 0, 2: 3}), 200, seed=0)
    assert est.capped < 200


def test_config_validation():
    with pytest.raises(InputError):
        GameConfig.build(path_graph(3), [1], 0.0, 0.0, start=0)
    with pytest.raises(TruncationError):
        dg = doubling_graph(8)
        GameConfig.build(dg.graph, range(1, 9), 0.0, 0.0, start=1)


def test_dpp_check():
    cfg = GameConfig.build(path_graph(6), range(1, 5), lambda k: {1: 0.5, 3: -0.25}.get(k, 0.0), {0: 0.0, 5: 2.0}, 2)
    u = solve(cfg.problem(), tol=1e-12).u
    assert dpp_check(cfg, u) <= 1e-9
    lin = GameConfig.build(path_graph(6), range(1, 5), 0.0, {0: 0.0, 5: 5.0}, 2)
    assert dpp_check(lin, np.arange(6.0)) == 0.0


def test_nonpositive_running_payoff_has_unique_value():
    cfg = GameConfig.build(grid_graph(5, 5), [6, 7, 8, 11, 12, 13, 16, 17, 18],
                           lambda k: -0.1 * (k % 3), lambda k: float(k % 5), 12)
    p = cfg.problem()
    assert np.all(p.f[p.interior] >= 0)
    rep = uniqueness_probe(p)
    assert rep.kind == "unique_evidence"
    assert dpp_check(cfg, rep.u_hi) <= 1e-9


@given(st.integers(0, 2**32 - 1), st.integers(4, 18))
def test_toward_boundary_terminates_within_distance(seed, n):
    rng = np.random.default_rng(seed)
    p = random_problem(rng, n, f_kind="any")
    X = p.graph.ids[p.interior]
    start = int(rng.choice(X))
    cfg = GameConfig.build(p.graph, X, p.f, p.g, start)
    d = cfg.boundary_distance()[cfg.start_pos]
    tr = play_game(cfg, TowardBoundary(), TowardBoundary(), seed)
    assert not tr.capped and tr.rounds <= d


@given(st.integers(0, 2**32 - 1), st.integers(4, 18), st.integers(0, 1000))
def test_payoff_accounting(seed, n, game_seed):
    rng = np.random.default_rng(seed)
    p = random_problem(rng, n, f_kind="any")
    X = p.graph.ids[p.interior]
    cfg = GameConfig.build(p.graph, X, p.f, p.g, int(rng.choice(X)), max_rounds=200)
    u = solve(cfg.problem(), tol=1e-12).u
    tr = play_game(cfg, GreedyMax(u), TowardBoundary(), game_seed)
    if not tr.capped:
        assert tr.recompute_payoff(cfg) == tr.payoff
        g = cfg.graph
        walk = tr.vertices + [tr.terminal]
        for a, b in zip(walk, walk[1:]):
            assert b in g.neighbors(a)
