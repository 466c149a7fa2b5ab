"""
Monte-Carlo engine for the tug-of-war game on a graph.

A token starts at an interior vertex. Each round a fair coin picks a player
and that player moves the token to a neighbor. Player I collects the running
payoff ``r`` of every interior vertex the token sits on and, when the token
enters the terminal set, the terminal payoff ``g`` there. The game value
solves ``Δ∞u = -2 r``, so the solver cross-check uses ``f_pde = -2 r``.

Coins are a pure function of ``(seed, game, round)``, which makes every game
reproducible on its own and lets Markov strategies run vectorized over many
games at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .calculus import laplacian_field
from .errors import InflapError, InputError, TruncationError
from .graph import Graph, bfs_levels
from .problem import DirichletProblem, _as_values

__all__ = [
    "StrategyFault",
    "EstimationError",
    "GameConfig",
    "Transcript",
    "Strategy",
    "GreedyMax",
    "GreedyMin",
    "TowardBoundary",
    "Scripted",
    "coin_flips",
    "play_game",
    "estimate_value",
    "ValueEstimate",
    "dpp_check",
]


class StrategyFault(InflapError):
    """A strategy proposed a move to a vertex that is not a neighbor."""


class EstimationError(InflapError):
    """No game terminated, so no value estimate exists."""


# ---------------------------------------------------------------------- #
# coins

def _mix64(z: np.ndarray) -> np.ndarray:
    # SplitMix64 finalizer; uint64 arithmetic wraps modulo 2**64.
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def coin_flips(seed: int, games, rounds) -> np.ndarray:
    """Fair coins for ``(seed, game, round)``; ``True`` means player I moves.

    ``games`` and ``rounds`` broadcast against each other.
    """
    with np.errstate(over="ignore"):
        s = _mix64(np.asarray([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))
        h = _mix64(s ^ np.asarray(games, dtype=np.uint64))
        h = _mix64(h ^ np.asarray(rounds, dtype=np.uint64))
    return (h >> np.uint64(63)).astype(bool)


# ---------------------------------------------------------------------- #


@dataclass(eq=False)
class GameConfig:
    """Board, payoffs and start of a tug-of-war game.

    ``r`` and ``g`` are full-length arrays (zero off ``X`` and ``Y``).
    """

    graph: Graph
    interior: np.ndarray
    r: np.ndarray
    g: np.ndarray
    start: int
    max_rounds: int = 10**6
    _dist: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def build(cls, graph: Graph, X, r=None, g=None, start: int | None = None,
              max_rounds: int = 10**6) -> "GameConfig":
        interior = X.copy() if isinstance(X, np.ndarray) and X.dtype == bool else graph.mask(X)
        if not interior.any() or interior.all():
            raise InputError("both the play region and the terminal set must be nonempty")
        bad = interior & ~graph.complete
        if bad.any():
            raise TruncationError("strategies need materialized neighborhoods on the play region")
        if start is None:
            raise InputError("start vertex required")
        if not graph.has_vertex(start) or not interior[graph.pos(start)]:
            raise InputError(f"start {start} is not in the play region")
        if max_rounds < 1:
            raise InputError("max_rounds must be >= 1")
        rv = _as_values(graph, r, interior, "r")
        gv = _as_values(graph, g, ~interior, "g")
        return cls(graph, interior, rv, gv, int(start), int(max_rounds))

    @property
    def start_pos(self) -> int:
        return self.graph.pos(self.start)

    @property
    def f_pde(self) -> np.ndarray:
        return np.where(self.interior, -2.0 * self.r, 0.0)

    def problem(self) -> DirichletProblem:
        """The Dirichlet problem whose solution is the game value."""
        return DirichletProblem.build(self.graph, self.interior, self.f_pde, self.g)

    def boundary_distance(self) -> np.ndarray:
        if self._dist is None:
            self._dist = bfs_levels(self.graph, np.flatnonzero(~self.interior))
        return self._dist


@dataclass
class Transcript:
    """Record of one game. ``payoff`` is ``None`` when the game was capped."""

    vertices: list[int]
    terminal: int | None
    coins: list[bool]
    payoff: float | None
    capped: bool

    @property
    def rounds(self) -> int:
        return len(self.coins)

    def recompute_payoff(self, cfg: GameConfig) -> float | None:
        if self.capped:
            return None
        # accumulate in play order so the result matches play_game bit for bit
        total = 0.0
        for p in cfg.graph.index(self.vertices):
            total += cfg.r[p]
        return float(total + cfg.g[cfg.graph.pos(self.terminal)])

    def as_dict(self) -> dict:
        return {"vertices": self.vertices, "terminal": self.terminal,
                "coins": [int(c) for c in self.coins],
                "payoff": "capped" if self.capped else self.payoff}


# ---------------------------------------------------------------------- #
# strategies


class Strategy:
    """A rule choosing the next vertex; Markov strategies expose a move table."""

    def table(self, cfg: GameConfig) -> np.ndarray | None:
        """Next position for every position (``-1`` where undefined), or ``None``."""
        return None

    def move(self, cfg: GameConfig, pos: int, round_: int) -> int:
        tab = self._cached(cfg)
        return int(tab[pos])

    def _cached(self, cfg: GameConfig) -> np.ndarray:
        key = id(cfg)
        if getattr(self, "_key", None) != key:
            self._tab = self.table(cfg)
            self._key = key
        return self._tab


def _argbest(graph: Graph, scores: np.ndarray, better) -> np.ndarray:
    """Per vertex, the neighbor position with the best score (smallest id on ties)."""
    out = np.full(graph.n, -1, dtype=np.int64)
    for p in range(graph.n):
        nb = graph.neighbor_positions(p)
        if nb.size == 0:
            continue
        s = scores[nb]
        best = better(s)
        out[p] = nb[np.flatnonzero(s == best)[0]]
    return out


class GreedyMax(Strategy):
    """Move to a neighbor maximizing ``field``."""

    def __init__(self, field: np.ndarray):
        self.field = np.asarray(field, dtype=float)

    def table(self, cfg):
        return _argbest(cfg.graph, self.field, np.max)


class GreedyMin(Strategy):
    """Move to a neighbor minimizing ``field``."""

    def __init__(self, field: np.ndarray):
        self.field = np.asarray(field, dtype=float)

    def table(self, cfg):
        return _argbest(cfg.graph, self.field, np.min)


class TowardBoundary(Strategy):
    """Move to a neighbor closest to the terminal set."""

    def table(self, cfg):
        return _argbest(cfg.graph, cfg.boundary_distance(), np.min)


class Scripted(Strategy):
    """Fixed vertex-to-vertex move map given by ids."""

    def __init__(self, moves: dict[int, int]):
        self.moves = {int(k): int(v) for k, v in moves.items()}

    def table(self, cfg):
        g = cfg.graph
        out = np.full(g.n, -1, dtype=np.int64)
        for k, v in self.moves.items():
            if g.has_vertex(k):
                out[g.pos(k)] = g.pos(v) if g.has_vertex(v) else -2
        return out


def _is_neighbor(graph: Graph, p: int, q: int) -> bool:
    if q < 0:
        return False
    nb = graph.neighbor_positions(p)
    return bool(np.any(nb == q))


def _fault(cfg: GameConfig, who: str, p: int, q: int, round_: int) -> StrategyFault:
    target = "nothing" if q < 0 else str(int(cfg.graph.ids[q]))
    return StrategyFault(
        f"round {round_}: player {who} moved from {int(cfg.graph.ids[p])} to {target}, not a neighbor"
    )


# ---------------------------------------------------------------------- #


def play_game(cfg: GameConfig, strat_I: Strategy, strat_II: Strategy, seed: int,
              game_index: int = 0) -> Transcript:
    """Play one game and return its transcript."""
    g = cfg.graph
    p = cfg.start_pos
    visited = [int(g.ids[p])]
    coins = []
    payoff = 0.0
    for t in range(cfg.max_rounds):
        c = bool(coin_flips(seed, game_index, t)[0])
        coins.append(c)
        payoff += cfg.r[p]
        q = (strat_I if c else strat_II).move(cfg, p, t)
        if not _is_neighbor(g, p, q):
            raise _fault(cfg, "I" if c else "II", p, q, t)
        p = q
        if not cfg.interior[p]:
            return Transcript(visited, int(g.ids[p]), coins, float(payoff + cfg.g[p]), False)
        visited.append(int(g.ids[p]))
    return Transcript(visited, None, coins, None, True)


class ValueEstimate(NamedTuple):
    mean: float
    stderr: float
    capped: int


def _valid_moves(cfg: GameConfig, tab: np.ndarray) -> np.ndarray:
    return np.array([_is_neighbor(cfg.graph, p, int(tab[p])) for p in range(cfg.graph.n)])


def _payoffs_vectorized(cfg, tab1, tab2, n_games, seed, chunk=1 << 16):
    ok1, ok2 = _valid_moves(cfg, tab1), _valid_moves(cfg, tab2)
    out = np.empty(n_games)
    for lo in range(0, n_games, chunk):
        games = np.arange(lo, min(lo + chunk, n_games), dtype=np.int64)
        pos = np.full(games.size, cfg.start_pos, dtype=np.int64)
        pay = np.zeros(games.size)
        slot = np.arange(games.size)
        res = np.full(games.size, np.nan)
        for t in range(cfg.max_rounds):
            c = coin_flips(seed, games, t)
            pay += cfg.r[pos]
            bad = np.where(c, ~ok1[pos], ~ok2[pos])
            if bad.any():
                k = int(np.argmax(bad))
                q = int((tab1 if c[k] else tab2)[pos[k]])
                raise _fault(cfg, "I" if c[k] else "II", int(pos[k]), q, t)
            pos = np.where(c, tab1[pos], tab2[pos])
            done = ~cfg.interior[pos]
            if done.any():
                res[slot[done]] = pay[done] + cfg.g[pos[done]]
                keep = ~done
                games, pos, pay, slot = games[keep], pos[keep], pay[keep], slot[keep]
                if games.size == 0:
                    break
        out[lo: lo + res.size] = res
    return out


def estimate_value(cfg: GameConfig, strat_I: Strategy, strat_II: Strategy, n_games: int,
                   seed: int) -> ValueEstimate:
    """Sample mean and standard error of the payoff over ``n_games`` seeded games.

    Game ``k`` uses coin stream ``(seed, k)``. Capped games are excluded from
    the mean and counted separately.
    """
    if n_games < 1:
        raise InputError("n_games must be >= 1")
    t1, t2 = strat_I.table(cfg), strat_II.table(cfg)
    if t1 is not None and t2 is not None:
        pay = _payoffs_vectorized(cfg, t1, t2, n_games, seed)
    else:
        pay = np.array([
            np.nan if (tr := play_game(cfg, strat_I, strat_II, seed, k)).capped else tr.payoff
            for k in range(n_games)
        ])
    finished = pay[np.isfinite(pay)]
    capped = int(n_games - finished.size)
    if finished.size == 0:
        raise EstimationError(f"all {n_games} games hit the cap of {cfg.max_rounds} rounds")
    mean = float(np.mean(finished))
    stderr = float(np.std(finished, ddof=1) / np.sqrt(finished.size)) if finished.size > 1 else 0.0
    return ValueEstimate(mean, stderr, capped)


def dpp_check(cfg: GameConfig, u: np.ndarray) -> float:
    """Sup-norm of ``Δ∞u + 2r`` over the play region."""
    u = np.asarray(u, dtype=float)
    if u.shape != (cfg.graph.n,) or np.any(~np.isfinite(u)):
        raise InputError("field must be finite on every vertex")
    if np.any(cfg.interior & ~cfg.graph.complete):
        raise TruncationError("play region has incomplete vertices")
    lap = laplacian_field(cfg.graph, u, cfg.interior)
    return float(np.max(np.abs(lap + 2.0 * cfg.r)[cfg.interior]))
