"""
Concrete graphs and fields: counterexamples and closed-form solutions.

Each generator documents its vertex id layout so tests can address named
vertices. Infinite structures are exposed to a declared depth and the
vertices whose neighborhoods are cut off are flagged incomplete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import laplacian_field
from .errors import InputError
from .graph import Graph, path_graph
from .problem import DirichletProblem

__all__ = [
    "SignChangeExample",
    "sign_change_example",
    "DoublingGraph",
    "doubling_graph",
    "tail_sums",
    "CombGraph",
    "comb_graph",
    "comb_spine_values",
    "comb_margins",
    "CCAExample",
    "cca_counterexample",
    "nonexistence_witness",
]


# ---------------------------------------------------------------------- #


@dataclass
class SignChangeExample:
    problem: DirichletProblem
    u: np.ndarray
    a_range: tuple[float, float] = (-1.0, 1.0)

    def shifted(self, a: float) -> np.ndarray:
        """``u + a`` on the interior, ``u`` on the boundary."""
        return self.u + a * self.problem.interior


def sign_change_example() -> SignChangeExample:
    """Two 4-vertex rails joined by two rungs; the interior is the middle square.

    Ids: bottom rail 0-1-2-3, top rail 4-5-6-7, rungs 1-5 and 2-6.
    Interior ``{1, 2, 5, 6}``; ``u`` is -1 on the bottom interior, 1 on the
    top interior and 0 on the four outer vertices; ``f = Δ∞u``.
    """
    edges = [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7), (1, 5), (2, 6)]
    labels = {0: "b0", 1: "b1", 2: "b2", 3: "b3", 4: "t0", 5: "t1", 6: "t2", 7: "t3"}
    g = Graph(range(8), edges, labels=labels)
    u = g.field({0: 0, 1: -1, 2: -1, 3: 0, 4: 0, 5: 1, 6: 1, 7: 0})
    X = g.mask([1, 2, 5, 6])
    f = laplacian_field(g, u, X)
    p = DirichletProblem.build(g, X, np.where(X, f, 0.0), 0.0)
    return SignChangeExample(p, u)


# ---------------------------------------------------------------------- #


@dataclass
class DoublingGraph:
    graph: Graph
    problem: DirichletProblem
    u: np.ndarray
    v: np.ndarray


def doubling_graph(N: int) -> DoublingGraph:
    """Vertices ``0..N`` with edges ``0 ~ k`` and ``k ~ 2k``.

    Vertex ``k`` has id ``k``. The hub 0 neighbors every positive integer, so
    it is incomplete under any truncation; ``k >= 1`` is complete iff
    ``2k <= N``. The problem has ``X = {1..N}``, ``g(0) = 0`` and ``f = 0``;
    ``u(n) = n`` and ``v = 0`` both solve it at every complete vertex.
    """
    if N < 4:
        raise InputError("N must be >= 4")
    k = np.arange(1, N + 1, dtype=np.int64)
    hub = np.column_stack([np.zeros(N, dtype=np.int64), k])
    dbl = k[2 * k <= N]
    edges = np.vstack([hub, np.column_stack([dbl, 2 * dbl])])
    verts = np.arange(N + 1, dtype=np.int64)
    complete = (verts >= 1) & (2 * verts <= N)
    g = Graph(verts, edges, complete=complete, root=0)
    p = DirichletProblem.build(g, g.ids >= 1, 0.0, 0.0)
    return DoublingGraph(g, p, verts.astype(float), np.zeros(N + 1))


# ---------------------------------------------------------------------- #


def tail_sums(C: float, n_max: int, M: int = 10**6, precision: float = 1e-15) -> tuple[np.ndarray, float]:
    """``S_n = sum_{k >= n} (C + k)^-3`` for ``n = 0..n_max`` and a certified error.

    The tail beyond ``n_max + M`` is bracketed between the integrals
    ``1 / (2 (C + K)^2)`` and ``1 / (2 (C + K - 1)^2)`` with ``K = n_max + M``;
    its midpoint is used and half the bracket width is the returned bound.
    Raises :class:`InputError` if that bound exceeds ``precision``.
    """
    K = n_max + M
    lo = 1.0 / (2 * (C + K) ** 2)
    hi = 1.0 / (2 * (C + K - 1) ** 2)
    err = (hi - lo) / 2
    if err > precision:
        need = math.ceil((1.0 / precision) ** (1 / 3))
        raise InputError(f"tail bracket too wide ({err:.2e} > {precision:.0e}); "
                         f"use M >= {need}")
    k = np.arange(n_max + 1, K, dtype=float)
    S = np.empty(n_max + 2)
    S[n_max + 1] = math.fsum((C + k) ** -3.0) + (lo + hi) / 2
    inv = (C + np.arange(n_max + 1, dtype=float)) ** -3.0
    for n in range(n_max, -1, -1):
        S[n] = S[n + 1] + inv[n]
    return S[: n_max + 1], err


def comb_spine_values(C: float, n_max: int, **kw) -> np.ndarray:
    """``v(n, 0)`` for ``n = 0..n_max`` from the tail sums."""
    S, _ = tail_sums(C, n_max + 1, **kw)
    v = np.empty(n_max + 1)
    v[0] = C ** 3 * S[0]
    for n in range(1, n_max + 1):
        v[n] = v[n - 1] + S[n]
    return v


def comb_margins(C: float, n_max: int, **kw) -> np.ndarray:
    """``v(n,0) - v(n-1,0) - v(n,0)/(C+n)^3`` for ``n = 1..n_max``."""
    S, _ = tail_sums(C, n_max + 1, **kw)
    v = comb_spine_values(C, n_max, **kw)
    n = np.arange(1, n_max + 1)
    return S[1: n_max + 1] - v[1:] / (C + n) ** 3.0


@dataclass
class CombGraph:
    graph: Graph
    problem: DirichletProblem
    u: np.ndarray
    v: np.ndarray
    C: float
    lengths: np.ndarray
    offsets: np.ndarray
    tail_error: float

    def vertex(self, n: int, l: int) -> int:
        """Id of the tooth vertex ``(n, l)``."""
        return int(self.offsets[n] + l)


def comb_graph(C: int = 2, N_teeth: int = 4, tooth_depth: int | None = None,
               max_vertices: int = 5_000_000) -> CombGraph:
    """Comb with spine ``(n, 0)`` and teeth of length ``l_n = (n + C)^3``.

    Vertex ``(n, l)`` has id ``offsets[n] + l`` where tooth ``n`` occupies
    ``min(l_n, tooth_depth) + 1`` consecutive ids. Tips ``(n, l_n)`` form the
    boundary with ``g = 0`` (only those exposed). The equation is
    ``Δ∞w = -1/l_n`` on the spine and ``0`` on the teeth; fields:

    * ``u(n, l) = (l_n - l) / l_n``
    * ``v(n, 0) = v(n-1, 0) + S_n`` with ``v(0, 0) = l_0 S_0`` and
      ``v(n, l) = (l_n - l) / l_n * v(n, 0)``, ``S_n`` the tail sums.

    The last spine vertex and cut-off tooth ends are incomplete.
    """
    if C < 2:
        raise InputError("C must be >= 2")
    if N_teeth < 2:
        raise InputError("need at least two teeth")
    n = np.arange(N_teeth)
    lengths = (n + C) ** 3
    exposed = lengths if tooth_depth is None else np.minimum(lengths, tooth_depth)
    if np.any(exposed < 1):
        raise InputError("tooth_depth must be >= 1")
    sizes = exposed + 1
    if sizes.sum() > max_vertices:
        raise InputError(f"comb would have {int(sizes.sum())} vertices; pass tooth_depth")
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
    total = int(sizes.sum())

    tooth = np.repeat(n, sizes)
    level = np.arange(total) - offsets[tooth]
    ids = np.arange(total, dtype=np.int64)
    along = ids[level > 0]
    edges = [np.column_stack([along - 1, along]),
             np.column_stack([offsets[:-1], offsets[1:]])]
    complete = np.ones(total, dtype=bool)
    complete[offsets[-1]] = False
    cut = exposed < lengths
    complete[(offsets + exposed)[cut]] = False
    labels = {int(i): f"({int(tooth[i])},{int(level[i])})" for i in ids} if total <= 10_000 else None
    g = Graph(ids, np.vstack(edges), complete=complete, labels=labels)

    ln = lengths[tooth].astype(float)
    X = level < lengths[tooth]
    f = np.where(X & (level == 0), -1.0 / ln, 0.0)
    p = DirichletProblem.build(g, X, f, 0.0)

    S, err = tail_sums(float(C), N_teeth)
    spine = np.empty(N_teeth)
    spine[0] = C ** 3 * S[0]
    for k in range(1, N_teeth):
        spine[k] = spine[k - 1] + S[k]
    frac = (ln - level) / ln
    u = frac
    v = frac * spine[tooth]
    return CombGraph(g, p, u, v, float(C), lengths, offsets, err)


# ---------------------------------------------------------------------- #


@dataclass
class CCAExample:
    graph: Graph
    u: np.ndarray
    a: float
    center: int
    top: dict[int, int] = field(default_factory=dict)
    bottom: dict[int, int] = field(default_factory=dict)


def cca_counterexample(a: float, half_width: int = 4) -> CCAExample:
    """Two parallel rails joined by one rung, plus a triangle vertex valued ``a``.

    Top rail position ``k`` (``-H <= k <= H``) has value ``2k`` and id
    ``k + H``; bottom rail position ``k`` has value ``2k + 1`` and id
    ``3H + 1 + k``. The rung joins top 0 and bottom 0 (values 0 and 1) and the
    center, id ``4H + 2``, is adjacent to both. Rail ends are incomplete.
    """
    if not 0.0 <= a <= 1.0:
        raise InputError("a must lie in [0, 1]")
    H = int(half_width)
    if H < 3:
        raise InputError("half_width must be >= 3")
    ks = range(-H, H + 1)
    top = {k: k + H for k in ks}
    bottom = {k: 3 * H + 1 + k for k in ks}
    center = 4 * H + 2
    edges = [(top[k], top[k + 1]) for k in range(-H, H)]
    edges += [(bottom[k], bottom[k + 1]) for k in range(-H, H)]
    edges += [(top[0], bottom[0]), (center, top[0]), (center, bottom[0])]
    complete = {top[-H]: False, top[H]: False, bottom[-H]: False, bottom[H]: False}
    labels = {top[k]: f"top{2 * k}" for k in ks} | {bottom[k]: f"bot{2 * k + 1}" for k in ks}
    labels[center] = "center"
    g = Graph(range(4 * H + 3), edges, complete=complete, labels=labels)
    vals = {top[k]: 2.0 * k for k in ks} | {bottom[k]: 2.0 * k + 1 for k in ks} | {center: a}
    return CCAExample(g, g.field(vals), float(a), center, top, bottom)


# ---------------------------------------------------------------------- #


def nonexistence_witness(depth: int, f_value: float = -1.0, radii=None, tol: float = 1e-10) -> list[dict]:
    """Growth of solutions on widening truncations of a half-line with ``f < 0``.

    For each length ``r`` the path ``0..r`` with ``g(0) = g(r) = 0`` and
    ``f = f_value`` is solved. The gradient estimate rearranged at a vertex
    of depth ``w`` forces ``||u|| >= -w sup f / 4``; both the solved sup-norm
    and that bound grow without limit in ``r``.
    """
    from .solver import solve

    if f_value >= 0:
        raise InputError("f must be negative")
    radii = list(range(2, depth + 1, max(1, depth // 8))) if radii is None else list(radii)
    if depth not in radii:
        radii.append(depth)
    rows = []
    for r in radii:
        g = path_graph(r + 1)
        p = DirichletProblem.build(g, range(1, r), f_value, {0: 0.0, r: 0.0})
        out = solve(p, tol=tol)
        w = p.width
        k = np.arange(r + 1)
        closed = -f_value * k * (r - k) / 2
        rows.append({
            "r": r,
            "width": w,
            "sup_norm": float(np.max(np.abs(out.u))),
            "closed_form_sup": float(np.max(closed)),
            "max_abs_error": float(np.max(np.abs(out.u - closed))),
            "gradient_lower_bound": -w * f_value / 4,
            "converged": out.converged,
        })
    return rows
