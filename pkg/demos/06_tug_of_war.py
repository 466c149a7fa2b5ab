"""Tug-of-war with running payoff: Monte Carlo against the solver."""

# %% Imports
from inflap import solve
from inflap.game import GameConfig, GreedyMax, GreedyMin, TowardBoundary, estimate_value, play_game
from inflap.graph import path_graph

# %% Path 0..4, payoff 1 on the right end and a running payoff at the middle
r = {2: 0.5}
cfg = GameConfig.build(path_graph(5), [1, 2, 3], lambda v: r.get(v, 0.0), {0: 0.0, 4: 1.0}, start=2)
u = solve(cfg.problem()).u
print("game value from the solver:", u[cfg.start_pos])

# %% One game with a full transcript
t = play_game(cfg, GreedyMax(u), GreedyMin(u), seed=7)
print("visited:", t.vertices, "coins:", [int(c) for c in t.coins], "payoff:", t.payoff)

# %% Many games, counter-based coins: reproducible for a given seed
est = estimate_value(cfg, GreedyMax(u), GreedyMin(u), 10**5, seed=7)
print(f"mean {est.mean:.4f} ± {est.stderr:.4f}, {est.capped} capped")

# %% A weaker strategy for player I lowers the payoff
est = estimate_value(cfg, TowardBoundary(), GreedyMin(u), 10**5, seed=7)
print(f"player I rushing to the boundary: mean {est.mean:.4f}")
