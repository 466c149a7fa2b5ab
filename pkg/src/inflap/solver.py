"""
Dirichlet solver: barrier-initialized monotone value iteration.

The update ``u(x) <- (sup_{y~x} u(y) + inf_{y~x} u(y) - f(x)) / 2`` is
monotone and nonexpansive in the sup-norm, and its fixed points are exactly
the solutions. Started from a supersolution (the upper barrier envelope)
the iterates decrease pointwise; started from a subsolution they increase.

For ``f == 0`` on a finite graph, :func:`solve_exact_amle` computes the
solution combinatorially by repeatedly labelling a steepest path; it serves
as an independent oracle for :func:`solve`.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .calculus import laplacian_field, residual
from .errors import InputError, PreconditionError
from .graph import bfs_levels
from .problem import DirichletProblem

__all__ = [
    "sweep",
    "barrier_envelope",
    "SolveOutcome",
    "solve",
    "solve_exact_amle",
    "UniquenessReport",
    "uniqueness_probe",
]


# ---------------------------------------------------------------------- #
# kernels


@njit(cache=True)
def _extrema(indptr, indices, u, p):
    s = indptr[p]
    hi = u[indices[s]]
    lo = hi
    for k in range(s + 1, indptr[p + 1]):
        v = u[indices[k]]
        if v > hi:
            hi = v
        if v < lo:
            lo = v
    return hi, lo


@njit(cache=True)
def _jacobi(indptr, indices, xs, f, u, tol, max_iters, history, direction):
    new = u.copy()
    first_bad = -1
    it = 0
    while it < max_iters:
        change = 0.0
        for p in xs:
            hi, lo = _extrema(indptr, indices, u, p)
            val = 0.5 * (hi + lo - f[p])
            d = val - u[p]
            if abs(d) > change:
                change = abs(d)
            if direction != 0 and first_bad < 0:
                if direction * d < -1e-12 * (1.0 + abs(u[p])):
                    first_bad = it
            new[p] = val
        for p in xs:
            u[p] = new[p]
        history[it] = change
        it += 1
        # residual of the previous iterate is 2 * change; nonexpansiveness
        # bounds the residual of the new one by the same quantity
        if 2.0 * change <= tol:
            break
    return it, first_bad


@njit(cache=True)
def _gauss_seidel(indptr, indices, xs, f, u, tol, max_iters, history, direction):
    first_bad = -1
    it = 0
    while it < max_iters:
        change = 0.0
        for p in xs:
            hi, lo = _extrema(indptr, indices, u, p)
            val = 0.5 * (hi + lo - f[p])
            d = val - u[p]
            if abs(d) > change:
                change = abs(d)
            if direction != 0 and first_bad < 0:
                if direction * d < -1e-12 * (1.0 + abs(u[p])):
                    first_bad = it
            u[p] = val
        history[it] = change
        it += 1
        if change <= tol:
            res = 0.0
            for p in xs:
                hi, lo = _extrema(indptr, indices, u, p)
                r = abs(hi + lo - 2.0 * u[p] - f[p])
                if r > res:
                    res = r
            if res <= tol:
                break
    return it, first_bad


# ---------------------------------------------------------------------- #


def sweep(p: DirichletProblem, u: np.ndarray) -> np.ndarray:
    """One Jacobi update on ``X``; ``g`` is imposed on ``Y`` before and after."""
    p.require_complete_interior()
    G = p.graph
    u = np.where(p.boundary, p.g, np.asarray(u, dtype=float))
    from .calculus import neighbor_extrema
    up, um = neighbor_extrema(G, u)
    out = np.where(p.interior, 0.5 * (up + um - p.f), p.g)
    return out


def _nearest_boundary_extreme(p: DirichletProblem, D: np.ndarray, pick) -> np.ndarray:
    """Min (or max) of ``g`` over the boundary vertices nearest to each vertex."""
    G = p.graph
    m = np.where(p.boundary, p.g, np.nan)
    rows = np.repeat(np.arange(G.n), G.degree)
    cols = G.indices
    finite = np.isfinite(D)
    top = int(np.max(D[finite])) if finite.any() else 0
    for k in range(1, top + 1):
        sel = (D[rows] == k - 1) & (D[cols] == k)
        tgt = cols[sel]
        src_vals = m[rows[sel]]
        layer = np.flatnonzero(D == k)
        init = np.full(layer.size, np.inf if pick is np.minimum else -np.inf)
        buf = np.full(G.n, np.inf if pick is np.minimum else -np.inf)
        buf[layer] = init
        pick.at(buf, tgt, src_vals)
        m[layer] = buf[layer]
    return m


def barrier_envelope(p: DirichletProblem, side: str = "upper", c: float | None = None,
                     width: int | None = None) -> np.ndarray:
    """Pointwise min (upper) / max (lower) of the ``R = 1`` barriers over all anchors.

    With ``R = 1`` the augmented-graph distance from an anchor ``y0`` to
    ``x`` is ``d(Y, x)`` when ``y0`` is a nearest boundary vertex and
    ``d(Y, x) + 1`` otherwise, so the envelope needs one multi-source search.
    """
    G = p.graph
    W = p.require_finite_width() if width is None else int(width)
    c = p.f_norm if c is None else float(c)
    b = 2 * p.g_norm + c * (W + 1)
    D = bfs_levels(G, np.flatnonzero(p.boundary))

    def h(r):
        return b * r - c * r * (r - 1) / 2

    gy = p.g[p.boundary]
    if side == "upper":
        near = _nearest_boundary_extreme(p, D, np.minimum)
        env = np.minimum(near + h(D), gy.min() + h(D + 1))
    elif side == "lower":
        near = _nearest_boundary_extreme(p, D, np.maximum)
        env = np.maximum(near - h(D), gy.max() - h(D + 1))
    else:
        raise InputError("side must be 'upper' or 'lower'")
    return np.where(p.boundary, p.g, env)


@dataclass
class SolveOutcome:
    u: np.ndarray
    residual: float
    iterations: int
    history: np.ndarray
    init: str
    scheme: str
    converged: bool
    monotone_violation: int | None = None

    def summary(self) -> dict:
        return {
            "residual": self.residual,
            "iterations": self.iterations,
            "init": self.init,
            "scheme": self.scheme,
            "converged": self.converged,
            "last_change": float(self.history[-1]) if self.history.size else 0.0,
        }


def solve(
    p: DirichletProblem,
    init: str | np.ndarray = "upper",
    tol: float = 1e-9,
    max_iters: int = 10**6,
    scheme: str = "jacobi",
    debug: bool = False,
) -> SolveOutcome:
    """Solve ``Δ∞u = f`` on ``X``, ``u = g`` on ``Y`` by monotone iteration.

    Parameters
    ----------
    init : {'upper', 'lower'} or array
        Start from the upper barrier envelope (iterates decrease), the lower
        one (iterates increase) or a custom field.
    tol : float
        Convergence requires both the sup-norm residual and the last
        per-sweep change to be at most ``tol``.
    scheme : {'jacobi', 'gauss_seidel'}
        Jacobi is the reference; Gauss-Seidel updates in increasing id order.
    debug : bool
        Track the first sweep at which a barrier-started iteration fails to
        be monotone (reported in ``monotone_violation``).

    Hitting ``max_iters`` is not an error: ``converged`` is ``False`` and the
    history is returned.
    """
    p.require_finite_width()
    p.require_complete_interior()
    G = p.graph
    if isinstance(init, str):
        if init not in ("upper", "lower"):
            raise InputError("init must be 'upper', 'lower' or a field")
        u = barrier_envelope(p, init)
        label = init
        direction = (-1 if init == "upper" else 1) if debug else 0
    else:
        u = np.asarray(init, dtype=float).copy()
        if u.shape != (G.n,) or np.any(~np.isfinite(u)):
            raise InputError("initial field must be finite on every vertex")
        u[p.boundary] = p.g[p.boundary]
        label = "custom"
        direction = 0
    xs = np.flatnonzero(p.interior).astype(np.int64)
    f = np.ascontiguousarray(p.f, dtype=np.float64)
    history = np.zeros(int(max_iters))
    if scheme == "jacobi":
        kernel = _jacobi
    elif scheme == "gauss_seidel":
        kernel = _gauss_seidel
    else:
        raise InputError("scheme must be 'jacobi' or 'gauss_seidel'")
    its, bad = kernel(G.indptr, G.indices, xs, f, u, float(tol), int(max_iters), history, direction)
    history = history[:its].copy()
    res = residual(p, u).sup_norm
    last = float(history[-1]) if its else 0.0
    converged = bool(res <= tol and last <= tol)
    return SolveOutcome(u, float(res), int(its), history, label, scheme, converged,
                        None if bad < 0 else int(bad))


# ---------------------------------------------------------------------- #
# combinatorial oracle for f == 0


def _bfs_through(adj: list[list[int]], start: int, free: np.ndarray) -> dict[int, int]:
    """Hop distances from ``start`` along paths whose inner vertices are free."""
    dist = {start: 0}
    q = deque([start])
    while q:
        x = q.popleft()
        for y in adj[x]:
            if y not in dist and free[y]:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


def solve_exact_amle(p: DirichletProblem) -> np.ndarray:
    """Exact solution for ``f == 0`` on a finite graph by steepest-path labelling.

    Repeatedly picks valued vertices ``a, b`` and a shortest path between
    them through unvalued vertices maximizing ``(val(b) - val(a)) / length``,
    labels the path by linear interpolation and promotes its vertices to
    valued. Ties go to the smallest ``(a, b)`` by id and then to the
    lexicographically smallest path.
    """
    G = p.graph
    if np.any(p.f[p.interior] != 0):
        raise PreconditionError("the steepest-path construction requires f == 0")
    if G.is_truncated:
        raise PreconditionError("the steepest-path construction needs a finite materialized graph")
    D = bfs_levels(G, np.flatnonzero(p.boundary))
    if np.any(~np.isfinite(D[p.interior])):
        raise PreconditionError("some interior vertex is not connected to the boundary")

    adj = [G.neighbor_positions(k).tolist() for k in range(G.n)]
    valued = p.boundary.copy()
    val = np.where(p.boundary, p.g, np.nan)
    scale = max(1.0, float(np.max(np.abs(p.g[p.boundary]))))

    while not valued.all():
        free = ~valued
        best = None  # (slope, a, b, length)
        for a in np.flatnonzero(valued):
            if not any(free[y] for y in adj[a]):
                continue
            da = _bfs_through(adj, int(a), free)
            cand: dict[int, int] = {}
            for w, dw in da.items():
                if w == a:
                    continue
                for b in adj[w]:
                    if valued[b] and b != a:
                        L = dw + 1
                        if L < cand.get(b, math.inf):
                            cand[b] = L
            for b, L in cand.items():
                s = (val[b] - val[a]) / L
                key = (a, b)
                if best is None or s > best[0] + 1e-14 * scale or (
                        abs(s - best[0]) <= 1e-14 * scale and key < (best[1], best[2])):
                    best = (s, int(a), int(b), L)
        if best is None:
            # an unvalued component touching a single valued vertex: constant extension
            for a in np.flatnonzero(valued):
                for y in adj[a]:
                    if free[y]:
                        comp = _bfs_through(adj, int(y), free)
                        for w in comp:
                            val[w] = val[a]
                            valued[w] = True
                        free = ~valued
            continue
        s, a, b, L = best
        # distances to b through free vertices, for the lexicographic walk
        db = _bfs_through(adj, b, free)
        path = [a]
        cur = a
        for remaining in range(L, 1, -1):
            nxt = min(y for y in adj[cur] if free[y] and db.get(y, math.inf) == remaining - 1)
            path.append(nxt)
            cur = nxt
        path.append(b)
        for k, w in enumerate(path[1:-1], start=1):
            val[w] = val[a] + s * k
            valued[w] = True
    return val


# ---------------------------------------------------------------------- #


@dataclass
class UniquenessReport:
    kind: str  # 'unique_evidence', 'distinct_solutions' or 'no_gap_found'
    gap: float
    u_hi: np.ndarray
    u_lo: np.ndarray
    witness: int
    f_sign: int
    outcomes: tuple = field(default=(), repr=False)


def uniqueness_probe(p: DirichletProblem, tol: float = 1e-8, solve_tol: float = 1e-12,
                     max_iters: int = 10**6, scheme: str = "jacobi") -> UniquenessReport:
    """Solve from both barrier envelopes and compare the limits.

    The upper start converges to the largest solution below the upper
    envelope and the lower start to the smallest above the lower one; a gap
    larger than ``tol`` exhibits two distinct bounded solutions.
    """
    hi = solve(p, "upper", tol=solve_tol, max_iters=max_iters, scheme=scheme)
    lo = solve(p, "lower", tol=solve_tol, max_iters=max_iters, scheme=scheme)
    if not (hi.converged and lo.converged):
        raise PreconditionError(
            f"solver did not converge (upper: {hi.residual:.3g}, lower: {lo.residual:.3g})")
    diff = np.abs(hi.u - lo.u)
    k = int(np.argmax(diff))
    gap = float(diff[k])
    sign = p.f_sign()
    if gap > tol:
        kind = "distinct_solutions"
    elif sign != 0:
        kind = "unique_evidence"
    else:
        kind = "no_gap_found"
    return UniquenessReport(kind, gap, hi.u, lo.u, int(p.graph.ids[k]), sign, (hi, lo))
