"""
Graphs, combinatorial distances, boundaries, widths and balls.

Vertices carry opaque integer ids. Internally a graph stores the sorted id
array together with a symmetric CSR adjacency in *position* space, so
fields over a graph are plain numpy arrays aligned with ``graph.ids``.

Truncated ("oracle") graphs mark each exposed vertex as complete or not.
Any answer that could change if an incomplete vertex gained its missing
neighbors is wrapped in :class:`TruncationLimited` instead of being
returned as a plain value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

import numpy as np
from scipy import sparse

from .errors import InputError, TruncationError

__all__ = [
    "Graph",
    "TruncationLimited",
    "bfs_levels",
    "distance",
    "distances_from",
    "boundary_of",
    "width_of",
    "ball",
    "diameter",
    "path_graph",
    "star_graph",
    "grid_graph",
    "random_connected_graph",
    "random_tree",
]


@dataclass(frozen=True)
class TruncationLimited:
    """Answer computed on the exposed part of a truncated graph.

    ``value`` is what the exposed graph gives; ``lower_bound`` (numeric
    answers only) is a certified lower bound for the true answer.
    """

    value: Any
    lower_bound: float | None = None
    note: str = ""


class Graph:
    """Undirected simple graph with opaque integer vertex ids.

    Parameters
    ----------
    vertices : iterable of int
        Vertex ids.
    edges : iterable of (int, int)
        Undirected edges. Duplicates (in either orientation) are merged.
        Self-loops and edges touching unknown ids raise :class:`InputError`.
    complete : array-like of bool or mapping id -> bool, optional
        Per-vertex completeness flag, aligned with the *sorted* ids when an
        array is given. Defaults to every vertex complete (materialized graph).
    labels : mapping id -> str, optional
        Human-readable names, carried through serialization.
    root, truncation_radius : optional
        Description of how a truncated graph was exposed.
    """

    def __init__(
        self,
        vertices: Iterable[int],
        edges: Iterable[tuple[int, int]] | np.ndarray,
        *,
        complete=None,
        labels: Mapping[int, str] | None = None,
        root: int | None = None,
        truncation_radius: int | None = None,
    ):
        ids = np.asarray(list(vertices) if not isinstance(vertices, np.ndarray) else vertices,
                         dtype=np.int64)
        ids = np.unique(ids)
        if ids.size == 0:
            raise InputError("graph needs at least one vertex")
        self.ids = ids
        self.n = int(ids.size)

        e = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise InputError("edges must be pairs of vertex ids")
        if np.any(e[:, 0] == e[:, 1]):
            bad = e[e[:, 0] == e[:, 1]][0]
            raise InputError(f"self-loop at vertex {int(bad[0])}")
        i = self.index(e[:, 0])
        j = self.index(e[:, 1])
        data = np.ones(2 * i.size, dtype=np.int8)
        adj = sparse.csr_matrix(
            (data, (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(self.n, self.n)
        )
        adj.sum_duplicates()
        adj.sort_indices()
        self.indptr = adj.indptr.astype(np.int64)
        self.indices = adj.indices.astype(np.int64)
        self.degree = np.diff(self.indptr)

        if complete is None:
            self.complete = np.ones(self.n, dtype=bool)
        elif isinstance(complete, Mapping):
            self.complete = np.ones(self.n, dtype=bool)
            if complete:
                keys = np.fromiter(complete.keys(), dtype=np.int64)
                vals = np.fromiter((bool(v) for v in complete.values()), dtype=bool)
                self.complete[self.index(keys)] = vals
        else:
            self.complete = np.asarray(complete, dtype=bool).copy()
            if self.complete.shape != (self.n,):
                raise InputError("completeness mask must have one entry per vertex")
        self.labels = dict(labels) if labels else {}
        self.root = root
        self.truncation_radius = truncation_radius

    # ------------------------------------------------------------------ #
    # construction helpers

    @classmethod
    def from_adjacency(cls, adjacency: Mapping[int, Iterable[int]], **kwargs) -> "Graph":
        """Build from a neighbor map, rejecting asymmetric entries."""
        adj = {int(k): {int(y) for y in v} for k, v in adjacency.items()}
        for x, nbrs in adj.items():
            for y in nbrs:
                if y not in adj:
                    raise InputError(f"vertex {y} (neighbor of {x}) is not a key")
                if x not in adj[y]:
                    raise InputError(f"asymmetric adjacency: {x}->{y} without {y}->{x}")
        edges = [(x, y) for x, nbrs in adj.items() for y in nbrs if x < y]
        selfloops = [x for x, nbrs in adj.items() if x in nbrs]
        if selfloops:
            raise InputError(f"self-loop at vertex {selfloops[0]}")
        return cls(list(adj), edges, **kwargs)

    @classmethod
    def from_oracle(
        cls,
        neighbors: Callable[[int], Iterable[int]],
        root: int,
        radius: int,
        labels: Callable[[int], str] | None = None,
    ) -> "Graph":
        """Expose the vertices within ``radius`` hops of ``root``.

        ``neighbors(v)`` must enumerate all true neighbors of ``v``. A vertex
        is complete iff every one of its neighbors is exposed.
        """
        if radius < 1:
            raise InputError("truncation radius must be >= 1")
        depth = {int(root): 0}
        frontier = [int(root)]
        nbr_cache: dict[int, list[int]] = {}
        for level in range(1, radius + 1):
            nxt = []
            for v in frontier:
                nbr_cache[v] = [int(y) for y in neighbors(v)]
                for y in nbr_cache[v]:
                    if y not in depth:
                        depth[y] = level
                        nxt.append(y)
            frontier = nxt
        for v in frontier:
            nbr_cache[v] = [int(y) for y in neighbors(v)]
        edges = set()
        complete = {}
        for v, nbrs in nbr_cache.items():
            complete[v] = all(y in depth for y in nbrs)
            for y in nbrs:
                if y in depth:
                    edges.add((min(v, y), max(v, y)))
        lab = {v: labels(v) for v in depth} if labels else None
        return cls(list(depth), sorted(edges), complete=complete, labels=lab,
                   root=int(root), truncation_radius=int(radius))

    # ------------------------------------------------------------------ #
    # addressing

    def index(self, ids) -> np.ndarray:
        """Positions of the given ids; raises :class:`InputError` on unknown ids."""
        arr = np.atleast_1d(np.asarray(ids, dtype=np.int64))
        pos = np.searchsorted(self.ids, arr)
        pos_c = np.minimum(pos, self.n - 1)
        bad = self.ids[pos_c] != arr
        if np.any(bad):
            raise InputError(f"unknown vertex id {int(arr[bad][0])}")
        return pos_c

    def pos(self, vid: int) -> int:
        return int(self.index([vid])[0])

    def has_vertex(self, vid: int) -> bool:
        p = int(np.searchsorted(self.ids, vid))
        return p < self.n and self.ids[p] == vid

    def neighbors(self, vid: int) -> np.ndarray:
        """Ids of the exposed neighbors of ``vid``."""
        p = self.pos(vid)
        return self.ids[self.indices[self.indptr[p]:self.indptr[p + 1]]]

    def neighbor_positions(self, p: int) -> np.ndarray:
        return self.indices[self.indptr[p]:self.indptr[p + 1]]

    def is_complete(self, vid: int) -> bool:
        return bool(self.complete[self.pos(vid)])

    @property
    def is_truncated(self) -> bool:
        return not bool(self.complete.all())

    @property
    def num_edges(self) -> int:
        return int(self.indices.size // 2)

    def edge_array(self) -> np.ndarray:
        """(m, 2) array of edges as ids with the smaller id first."""
        rows = np.repeat(np.arange(self.n), self.degree)
        keep = rows < self.indices
        return np.column_stack([self.ids[rows[keep]], self.ids[self.indices[keep]]])

    def mask(self, vertex_set: Iterable[int]) -> np.ndarray:
        """Boolean position mask for a collection of ids."""
        m = np.zeros(self.n, dtype=bool)
        s = np.fromiter(vertex_set, dtype=np.int64) if not isinstance(vertex_set, np.ndarray) \
            else vertex_set.astype(np.int64)
        if s.size:
            m[self.index(s)] = True
        return m

    def id_set(self, mask: np.ndarray) -> frozenset:
        return frozenset(int(v) for v in self.ids[mask])

    # ------------------------------------------------------------------ #
    # fields

    def field(self, values: Mapping[int, float] | None = None, default: float = np.nan) -> np.ndarray:
        """Array aligned with ``ids`` filled from a mapping id -> value."""
        out = np.full(self.n, default, dtype=float)
        if values:
            keys = np.fromiter((int(k) for k in values.keys()), dtype=np.int64)
            vals = np.fromiter((float(v) for v in values.values()), dtype=float)
            out[self.index(keys)] = vals
        return out

    def field_from_function(self, func: Callable[[int], float]) -> np.ndarray:
        return np.array([func(int(v)) for v in self.ids], dtype=float)

    def as_dict(self, values: np.ndarray, mask: np.ndarray | None = None) -> dict[int, float]:
        sel = np.arange(self.n) if mask is None else np.flatnonzero(mask)
        return {int(self.ids[p]): float(values[p]) for p in sel}

    def materialized(self) -> "Graph":
        """Copy that treats the exposed graph as a finite graph in its own right."""
        g = Graph.__new__(Graph)
        g.__dict__.update(self.__dict__)
        g.complete = np.ones(self.n, dtype=bool)
        g.root = None
        g.truncation_radius = None
        return g

    def __repr__(self) -> str:
        kind = "truncated" if self.is_truncated else "materialized"
        return f"Graph(n={self.n}, m={self.num_edges}, {kind})"


# ---------------------------------------------------------------------- #
# breadth-first search


def _gather_neighbors(indptr: np.ndarray, indices: np.ndarray, frontier: np.ndarray) -> np.ndarray:
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offs = np.repeat(starts - (np.cumsum(counts) - counts), counts)
    return indices[offs + np.arange(total)]


def bfs_levels(graph: Graph, sources: np.ndarray, max_depth: float = np.inf) -> np.ndarray:
    """Multi-source hop distances in position space (``inf`` when unreachable)."""
    dist = np.full(graph.n, np.inf)
    frontier = np.unique(np.asarray(sources, dtype=np.int64))
    if frontier.size == 0:
        return dist
    dist[frontier] = 0.0
    level = 0
    while frontier.size and level < max_depth:
        level += 1
        nbrs = _gather_neighbors(graph.indptr, graph.indices, frontier)
        nbrs = nbrs[np.isinf(dist[nbrs])]
        frontier = np.unique(nbrs)
        dist[frontier] = level
    return dist


def _escape_bound(graph: Graph, dist: np.ndarray, sources_complete: bool) -> np.ndarray:
    """Lower bound on the length of any true path that leaves the exposed graph.

    Such a path ends with an unexposed vertex followed by an exposed suffix
    starting at an incomplete vertex. When the source set is known in full
    and exposed, its exposed prefix also reaches an incomplete vertex first.
    """
    inc = np.flatnonzero(~graph.complete)
    d_inc = bfs_levels(graph, inc)
    bound = d_inc + 1.0
    if sources_complete:
        m = float(np.min(dist[inc])) if inc.size else np.inf
        bound = bound + (m + 1.0)
    return bound


def distances_from(graph: Graph, sources: Iterable[int], *, sources_complete: bool = True):
    """Hop distances from a vertex set to every vertex.

    Returns ``(dist, lower)`` arrays in position space: ``dist`` is the
    exposed-graph distance and ``lower`` a certified lower bound on the true
    distance (equal to ``dist`` on materialized graphs).
    """
    src = graph.index(list(sources))
    if src.size == 0:
        raise InputError("source set must be nonempty")
    dist = bfs_levels(graph, src)
    if not graph.is_truncated:
        return dist, dist.copy()
    lower = np.minimum(dist, _escape_bound(graph, dist, sources_complete))
    return dist, lower


def distance(graph: Graph, sources: Iterable[int], target: int):
    """Combinatorial distance from a vertex set to a vertex.

    Returns an ``int`` (or ``math.inf`` when unreachable), or a
    :class:`TruncationLimited` carrying a lower bound when the truncation
    could hide a shorter path.
    """
    src = list(sources) if not isinstance(sources, (int, np.integer)) else [int(sources)]
    t = graph.pos(target)
    dist, lower = distances_from(graph, src)
    d, lo = dist[t], lower[t]
    if d == lo:
        return math.inf if np.isinf(d) else int(d)
    return TruncationLimited(value=math.inf if np.isinf(d) else int(d), lower_bound=float(lo),
                             note="search reached incomplete vertices")


def boundary_of(graph: Graph, X: Iterable[int]):
    """Vertices outside ``X`` adjacent to some vertex of ``X``."""
    m = graph.mask(X)
    out = np.zeros(graph.n, dtype=bool)
    xs = np.flatnonzero(m)
    out[_gather_neighbors(graph.indptr, graph.indices, xs)] = True
    out &= ~m
    result = graph.id_set(out)
    if np.any(~graph.complete[m]):
        return TruncationLimited(value=result, note="X contains incomplete vertices")
    return result


def width_of(graph: Graph, X: Iterable[int]):
    """``sup_{x in X} d(boundary(X), x)`` by one multi-source sweep.

    Returns an ``int`` or ``math.inf`` (some vertex of ``X`` cannot reach the
    boundary), or :class:`TruncationLimited` with a certified lower bound.
    """
    m = graph.mask(X)
    if not m.any():
        raise InputError("X must be nonempty")
    bnd = boundary_of(graph, graph.ids[m])
    bset = bnd.value if isinstance(bnd, TruncationLimited) else bnd
    if not bset:
        dist = np.full(graph.n, np.inf)
        lower = _escape_bound(graph, dist, False) if graph.is_truncated else dist
        lower = np.minimum(dist, lower)
    else:
        dist, lower = distances_from(graph, bset, sources_complete=False)
    w = float(np.max(dist[m]))
    lo = float(np.max(lower[m]))
    if w == lo:
        return math.inf if np.isinf(w) else int(w)
    return TruncationLimited(value=math.inf if np.isinf(w) else int(w), lower_bound=lo,
                             note="width of the exposed part; truth may be larger")


def ball(graph: Graph, x: int, r: int):
    """Open ball ``{y : d(x, y) < r}`` as a frozenset of ids."""
    if r < 1:
        raise InputError("ball radius must be >= 1")
    p = graph.pos(x)
    dist = bfs_levels(graph, np.array([p]), max_depth=r - 1)
    members = graph.id_set(dist < r)
    inc = ~graph.complete
    if inc.any() and np.min(dist[inc]) < r - 1:
        return TruncationLimited(value=members, note="ball reaches incomplete vertices")
    return members


def diameter(graph: Graph, S: Iterable[int]):
    """``sup_{x, y in S} d(x, y)`` (distances taken in the whole graph)."""
    m = graph.mask(S)
    best = 0.0
    exact = True
    for p in np.flatnonzero(m):
        dist, lower = distances_from(graph, [int(graph.ids[p])])
        best = max(best, float(np.max(dist[m])))
        exact &= bool(np.all(dist[m] == lower[m]))
    value = math.inf if np.isinf(best) else int(best)
    return value if exact else TruncationLimited(value=value, note="truncation-limited diameter")


# ---------------------------------------------------------------------- #
# small builders used throughout tests and demos


def path_graph(n: int, start: int = 0) -> Graph:
    """Path ``start -- start+1 -- ... -- start+n-1``."""
    v = np.arange(start, start + n)
    return Graph(v, np.column_stack([v[:-1], v[1:]]))


def star_graph(leaves: int) -> Graph:
    """Center 0 joined to leaves ``1..leaves``."""
    v = np.arange(leaves + 1)
    return Graph(v, np.column_stack([np.zeros(leaves, dtype=np.int64), v[1:]]))


def grid_graph(rows: int, cols: int) -> Graph:
    """4-neighbor lattice; vertex ``(i, j)`` has id ``i * cols + j``."""
    ids = np.arange(rows * cols).reshape(rows, cols)
    h = np.column_stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()])
    v = np.column_stack([ids[:-1, :].ravel(), ids[1:, :].ravel()])
    return Graph(ids.ravel(), np.vstack([h, v]))


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    """Uniform random recursive tree on ``0..n-1``."""
    parents = [int(rng.integers(0, k)) for k in range(1, n)]
    return Graph(range(n), [(p, k) for k, p in enumerate(parents, start=1)])


def random_connected_graph(n: int, extra_edges: int, rng: np.random.Generator) -> Graph:
    """Random tree on ``0..n-1`` plus up to ``extra_edges`` random chords."""
    edges = {(min(p, k), max(p, k)) for k, p in
             enumerate((int(rng.integers(0, k)) for k in range(1, n)), start=1)}
    for _ in range(extra_edges):
        a, b = (int(t) for t in rng.integers(0, n, size=2))
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return Graph(range(n), sorted(edges))
