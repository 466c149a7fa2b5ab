"""
Discrete infinity Laplacian and the estimates built on it.

Everything here works on numpy arrays aligned with ``graph.ids``. The
operator at a vertex ``x`` is ``inf_{y~x} u(y) + sup_{y~x} u(y) - 2 u(x)``;
it is only evaluated at vertices whose neighborhoods are complete.

Sign conventions: a problem ``Δ∞u = f`` has supersolutions ``Δ∞v <= f``
(the class whose infimum is the Perron solution) and subsolutions
``Δ∞u >= f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InputError, PreconditionError, TruncationError
from .graph import Graph, TruncationLimited, ball, bfs_levels, distances_from
from .problem import DirichletProblem

TAU = 1e-9

__all__ = [
    "TAU",
    "neighbor_extrema",
    "neighbor_extrema_at",
    "inf_laplacian",
    "laplacian_field",
    "Residual",
    "residual",
    "is_supersolution",
    "is_subsolution",
    "ComparisonReport",
    "comparison_check",
    "marching_check",
    "GradientCheck",
    "gradient_estimate_check",
    "gradient_estimate_sweep",
    "quadratic_profile",
    "quadratic_field",
    "BarrierSpec",
    "Barrier",
    "barrier_field",
    "barrier_guarantees",
    "cone_field",
    "cone_property_holds",
    "ProbeReport",
    "cca_ccb_probe",
    "LiouvilleResult",
    "liouville_probe",
]


# ---------------------------------------------------------------------- #
# the operator


def neighbor_extrema(graph: Graph, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(u_plus, u_minus)``: sup and inf of ``u`` over exposed neighbors.

    Isolated vertices get ``nan``.
    """
    u = np.asarray(u, dtype=float)
    vals = u[graph.indices]
    up = np.full(graph.n, np.nan)
    um = np.full(graph.n, np.nan)
    has = graph.degree > 0
    if vals.size:
        starts = graph.indptr[:-1][has]
        up[has] = np.maximum.reduceat(vals, starts)
        um[has] = np.minimum.reduceat(vals, starts)
    return up, um


def _check_vertex(graph: Graph, p: int) -> None:
    if not graph.complete[p]:
        raise TruncationError(f"vertex {int(graph.ids[p])} has an incomplete neighborhood")
    if graph.degree[p] == 0:
        raise DomainError(f"vertex {int(graph.ids[p])} is isolated")


def neighbor_extrema_at(graph: Graph, u: np.ndarray, x: int) -> tuple[float, float]:
    """``(u_plus(x), u_minus(x))`` at a single vertex id."""
    p = graph.pos(x)
    _check_vertex(graph, p)
    vals = np.asarray(u, dtype=float)[graph.neighbor_positions(p)]
    return float(vals.max()), float(vals.min())


def inf_laplacian(graph: Graph, u: np.ndarray, x: int) -> float:
    """Discrete infinity Laplacian of ``u`` at vertex id ``x``."""
    up, um = neighbor_extrema_at(graph, u, x)
    return um + up - 2.0 * float(u[graph.pos(x)])


def laplacian_field(
    graph: Graph,
    u: np.ndarray,
    where: np.ndarray | None = None,
    *,
    skip_incomplete: bool = False,
) -> np.ndarray:
    """Δ∞u on the positions selected by the mask ``where`` (``nan`` elsewhere).

    Raises :class:`TruncationError` if ``where`` contains an incomplete
    vertex, unless ``skip_incomplete`` is set (those entries become ``nan``).
    """
    where = np.ones(graph.n, dtype=bool) if where is None else np.asarray(where, dtype=bool)
    inc = where & ~graph.complete
    if inc.any():
        if not skip_incomplete:
            raise TruncationError(
                f"vertex {int(graph.ids[np.argmax(inc)])} has an incomplete neighborhood")
        where = where & graph.complete
    iso = where & (graph.degree == 0)
    if iso.any():
        raise DomainError(f"vertex {int(graph.ids[np.argmax(iso)])} is isolated")
    up, um = neighbor_extrema(graph, u)
    out = np.full(graph.n, np.nan)
    out[where] = up[where] + um[where] - 2.0 * np.asarray(u, dtype=float)[where]
    return out


@dataclass
class Residual:
    """Defect ``Δ∞u - f`` on ``X`` (``nan`` off ``X``) and boundary mismatch."""

    defect: np.ndarray
    boundary_mismatch: float
    sup_norm: float
    witness: int | None

    def __float__(self) -> float:
        return self.sup_norm


def residual(p: DirichletProblem, u: np.ndarray, *, complete_only: bool = False) -> Residual:
    """Pointwise defect and its sup-norm (interior defect and boundary mismatch)."""
    u = np.asarray(u, dtype=float)
    if u.shape != (p.graph.n,) or np.any(~np.isfinite(u)):
        raise InputError("field must be finite and defined on every vertex")
    lap = laplacian_field(p.graph, u, p.interior, skip_incomplete=complete_only)
    defect = lap - np.where(p.interior, p.f, np.nan)
    bm = float(np.max(np.abs(u - p.g)[p.boundary], initial=0.0))
    ad = np.abs(defect)
    interior_sup = float(np.nanmax(ad)) if np.any(np.isfinite(ad)) else 0.0
    witness = int(p.graph.ids[np.nanargmax(ad)]) if np.any(np.isfinite(ad)) else None
    return Residual(defect, bm, max(interior_sup, bm), witness)


def is_supersolution(p: DirichletProblem, v: np.ndarray, tau: float = TAU, *,
                     boundary: bool = True) -> bool:
    """``Δ∞v <= f + tau`` on ``X`` and (if ``boundary``) ``v >= g - tau`` on ``Y``."""
    lap = laplacian_field(p.graph, v, p.interior)
    ok = bool(np.all(lap[p.interior] <= p.f[p.interior] + tau))
    if boundary:
        ok &= bool(np.all(v[p.boundary] >= p.g[p.boundary] - tau))
    return ok


def is_subsolution(p: DirichletProblem, u: np.ndarray, tau: float = TAU, *,
                   boundary: bool = True) -> bool:
    """``Δ∞u >= f - tau`` on ``X`` and (if ``boundary``) ``u <= g + tau`` on ``Y``."""
    lap = laplacian_field(p.graph, u, p.interior)
    ok = bool(np.all(lap[p.interior] >= p.f[p.interior] - tau))
    if boundary:
        ok &= bool(np.all(u[p.boundary] <= p.g[p.boundary] + tau))
    return ok


# ---------------------------------------------------------------------- #
# comparison


@dataclass
class ComparisonReport:
    sup_diff_interior: float
    sup_diff_boundary: float
    witness_interior: int
    witness_boundary: int
    verdict: bool
    hypotheses_met: bool
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "sup_diff_interior": self.sup_diff_interior,
            "sup_diff_boundary": self.sup_diff_boundary,
            "witness_interior": self.witness_interior,
            "witness_boundary": self.witness_boundary,
            "verdict": self.verdict,
            "hypotheses_met": self.hypotheses_met,
            "notes": list(self.notes),
        }


def comparison_check(p: DirichletProblem, u: np.ndarray, v: np.ndarray, tau: float = TAU,
                     tol: float = 1e-8) -> ComparisonReport:
    """Check ``sup_V(u - v) == sup_Y(u - v)`` for a subsolution ``u`` and supersolution ``v``.

    The verdict is the equality within ``tol``. ``hypotheses_met`` records
    whether the setting guarantees it: ``u`` a subsolution and ``v`` a
    supersolution within ``tau``, ``f`` of one sign, finite width.
    """
    notes = []
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    diff = u - v
    ix = np.flatnonzero(p.interior)
    iy = np.flatnonzero(p.boundary)
    wi = ix[np.argmax(diff[ix])]
    wb = iy[np.argmax(diff[iy])]
    sup_x = float(diff[wi])
    sup_y = float(diff[wb])
    verdict = max(sup_x, sup_y) <= sup_y + tol

    ok = True
    if not is_subsolution(p, u, tau, boundary=False):
        ok = False
        notes.append("u is not a subsolution within tau")
    if not is_supersolution(p, v, tau, boundary=False):
        ok = False
        notes.append("v is not a supersolution within tau")
    if p.f_sign() == 0:
        ok = False
        notes.append("comparison hypotheses not met: f changes sign")
    w = p.partition.width_bound
    if w is None or math.isinf(w):
        ok = False
        notes.append("comparison hypotheses not met: width not known to be finite")
    return ComparisonReport(sup_x, sup_y, int(p.graph.ids[wi]), int(p.graph.ids[wb]),
                            bool(verdict), ok, notes)


def _require_solution_at(p: DirichletProblem, u: np.ndarray, pos: int, tau: float) -> tuple[float, float]:
    g = p.graph
    if not p.interior[pos]:
        raise DomainError(f"vertex {int(g.ids[pos])} is not interior")
    _check_vertex(g, pos)
    vals = u[g.neighbor_positions(pos)]
    up, um = float(vals.max()), float(vals.min())
    if abs(up + um - 2 * u[pos] - p.f[pos]) > tau:
        raise PreconditionError(f"u does not solve the equation at vertex {int(g.ids[pos])}")
    return up, um


def marching_check(p: DirichletProblem, u: np.ndarray, x: int, y: int, tau: float = TAU) -> bool:
    """``u(x) - u_-(x) = u_+(x) - u(x) - f(x) >= u(y) - u(x) - f(x)`` for a neighbor ``y``."""
    g = p.graph
    px, py = g.pos(x), g.pos(y)
    u = np.asarray(u, dtype=float)
    up, um = _require_solution_at(p, u, px, tau)
    if py not in set(g.neighbor_positions(px).tolist()):
        raise InputError(f"{y} is not a neighbor of {x}")
    left = u[px] - um
    mid = up - u[px] - p.f[px]
    right = u[py] - u[px] - p.f[px]
    return bool(abs(left - mid) <= tau and mid >= right - tau)


@dataclass
class GradientCheck:
    lhs: float
    rhs: float
    holds: bool


def _inf_and_supf(p: DirichletProblem, u: np.ndarray, inf_u, sup_f) -> tuple[float, float]:
    if p.graph.is_truncated and (inf_u is None or sup_f is None):
        raise TruncationError(
            "inf u and sup f over a truncated graph may be lowered/raised by unexposed "
            "vertices; pass inf_u and sup_f explicitly")
    if inf_u is None:
        inf_u = float(np.min(u))
    if sup_f is None:
        sup_f = float(np.max(p.f[p.interior]))
    return float(inf_u), float(sup_f)


def gradient_estimate_check(p: DirichletProblem, u: np.ndarray, x: int, y: int, N: int, *,
                            tau: float = TAU, inf_u: float | None = None,
                            sup_f: float | None = None) -> GradientCheck:
    """``u(y) - u(x) <= (u(x) - inf u)/N + (N + 1) sup f / 2`` for ``y ~ x``, ``N <= d(Y, x)``."""
    g = p.graph
    u = np.asarray(u, dtype=float)
    px, py = g.pos(x), g.pos(y)
    _require_solution_at(p, u, px, tau)
    if py not in set(g.neighbor_positions(px).tolist()):
        raise InputError(f"{y} is not a neighbor of {x}")
    _, lower = distances_from(g, g.ids[p.boundary], sources_complete=not g.is_truncated)
    if not (1 <= N <= lower[px]):
        raise PreconditionError(f"need 1 <= N <= d(Y, x) = {lower[px]:g}, got N = {N}")
    iu, sf = _inf_and_supf(p, u, inf_u, sup_f)
    lhs = float(u[py] - u[px])
    rhs = (u[px] - iu) / N + (N + 1) * sf / 2
    slack = (N + 1) * tau / 2 + tau
    return GradientCheck(lhs, float(rhs), bool(lhs <= rhs + slack))


def gradient_estimate_sweep(p: DirichletProblem, u: np.ndarray, *, tau: float = TAU,
                            inf_u: float | None = None, sup_f: float | None = None,
                            complete_only: bool = False) -> tuple[int, int]:
    """Run the gradient estimate on every admissible ``(x, y ~ x, N)``.

    Returns ``(checked, violations)``. With ``complete_only`` incomplete
    interior vertices are skipped instead of refused.
    """
    g = p.graph
    u = np.asarray(u, dtype=float)
    res = residual(p, u, complete_only=complete_only)
    if res.sup_norm > tau:
        raise PreconditionError(f"u is not a solution within tau (residual {res.sup_norm:.3g})")
    iu, sf = _inf_and_supf(p, u, inf_u, sup_f)
    _, lower = distances_from(g, g.ids[p.boundary], sources_complete=not g.is_truncated)
    xs = np.flatnonzero(p.interior & g.complete)
    checked = violations = 0
    dmax = lower[xs]
    deg = g.degree[xs]
    up, _ = neighbor_extrema(g, u)
    lhs_max = up[xs] - u[xs]
    Nmax = int(np.max(dmax[np.isfinite(dmax)], initial=0))
    for N in range(1, Nmax + 1):
        sel = dmax >= N
        if not sel.any():
            break
        rhs = (u[xs[sel]] - iu) / N + (N + 1) * sf / 2 + (N + 1) * tau / 2 + tau
        checked += int(deg[sel].sum())
        bad = np.flatnonzero(lhs_max[sel] > rhs)
        for k in bad:
            pp = xs[sel][k]
            nb = g.neighbor_positions(pp)
            violations += int(np.sum(u[nb] - u[pp] > rhs[k]))
    return checked, violations


# ---------------------------------------------------------------------- #
# quadratic barriers


def quadratic_profile(r, a: float, b: float, c: float, side: str):
    """``a + b r - c r(r-1)/2`` (upper) or ``a - b r + c r(r-1)/2`` (lower)."""
    r = np.asarray(r, dtype=float)
    q = b * r - c * r * (r - 1) / 2
    if side == "upper":
        return a + q
    if side == "lower":
        return a - q
    raise InputError("side must be 'upper' or 'lower'")


def quadratic_field(graph: Graph, anchor: Iterable[int], a: float, b: float, c: float,
                    side: str) -> np.ndarray:
    """Quadratic profile of the hop distance to an anchor set (``nan`` if unreachable)."""
    d = bfs_levels(graph, graph.index(list(anchor)))
    out = quadratic_profile(np.where(np.isfinite(d), d, 0.0), a, b, c, side)
    return np.where(np.isfinite(d), out, np.nan)


@dataclass(frozen=True)
class BarrierSpec:
    a: float
    b: float
    c: float
    R: int
    anchor: int


@dataclass
class Barrier:
    """Barrier built on the augmented graph.

    ``augmented`` contains the original vertices plus ``R - 1`` new path
    vertices per boundary vertex; ``values_augmented`` lives on it and
    ``values`` is its restriction to the original graph.
    """

    spec: BarrierSpec
    side: str
    augmented: Graph
    values_augmented: np.ndarray
    values: np.ndarray
    distance: np.ndarray


def barrier_field(p: DirichletProblem, y0: int, c: float, R: int = 1, side: str = "upper",
                  width: int | None = None) -> Barrier:
    """Quadratic barrier anchored at boundary vertex ``y0``.

    Joins ``y0`` to every boundary vertex ``y`` through a fresh path of
    length ``R``, sets ``a`` to the sup (upper) or inf (lower) of ``g`` over
    ``{y : d(y0, y) < R}``, ``b = 2||g||/R + c (W + R)``, and evaluates the
    quadratic profile of the augmented-graph distance to ``y0``.
    """
    G = p.graph
    if R < 1:
        raise InputError("R must be >= 1")
    if c < 0:
        raise InputError("c must be >= 0")
    if G.is_truncated and (G.truncation_radius is None or R >= G.truncation_radius):
        raise TruncationError("barrier distances are not certified on this truncated graph")
    W = p.require_finite_width() if width is None else int(width)
    py0 = G.pos(y0)
    if not p.boundary[py0]:
        raise InputError(f"anchor {y0} is not a boundary vertex")

    d0 = bfs_levels(G, np.array([py0]))
    Ymask = p.boundary
    near = Ymask & (d0 < R)
    gn = p.g_norm
    a = float(np.max(p.g[near])) if side == "upper" else float(np.min(p.g[near]))
    b = 2 * gn / R + c * (W + R)

    # augmented graph: paths y0 ~ y_1 ~ ... ~ y_{R-1} ~ y for every boundary y != y0
    next_id = int(G.ids.max()) + 1
    new_vertices = []
    new_edges = []
    for py in np.flatnonzero(Ymask):
        if py == py0:
            continue
        y = int(G.ids[py])
        chain = [int(y0)] + list(range(next_id, next_id + R - 1)) + [y]
        next_id += R - 1
        new_vertices.extend(chain[1:-1])
        new_edges.extend(zip(chain[:-1], chain[1:]))
    old_edges = G.edge_array()
    edges = np.vstack([old_edges, np.asarray(new_edges, dtype=np.int64).reshape(-1, 2)])
    Gp = Graph(np.concatenate([G.ids, np.asarray(new_vertices, dtype=np.int64)]), edges)
    dp = bfs_levels(Gp, Gp.index([y0]))
    vals_aug = quadratic_profile(dp, a, b, c, side)
    back = Gp.index(G.ids)
    return Barrier(BarrierSpec(a, b, float(c), int(R), int(y0)), side, Gp, vals_aug,
                   vals_aug[back], dp[back])


def barrier_guarantees(p: DirichletProblem, bar: Barrier, tau: float = TAU) -> dict[str, bool]:
    """Evaluate the three barrier guarantees on the original graph."""
    G = p.graph
    w = bar.values
    c = bar.spec.c
    y0 = G.pos(bar.spec.anchor)
    out = {}
    out["anchor_matches_g"] = bool(bar.spec.R != 1 or abs(w[y0] - p.g[y0]) <= tau)
    lap = laplacian_field(G, w, p.interior)
    if bar.side == "upper":
        out["operator"] = bool(np.all(-lap[p.interior] >= c - tau))
        out["boundary_order"] = bool(np.all(w[p.boundary] >= p.g[p.boundary] - tau))
    else:
        out["operator"] = bool(np.all(lap[p.interior] >= c - tau))
        out["boundary_order"] = bool(np.all(w[p.boundary] <= p.g[p.boundary] + tau))
    return out


# ---------------------------------------------------------------------- #
# cones


def cone_field(graph: Graph, x0: int, a: float, b: float, side: str) -> np.ndarray:
    """``a - b d(x0, .)`` (lower) or ``a + b d(x0, .)`` (upper)."""
    if b < 0:
        raise InputError("cone slope b must be >= 0")
    d = bfs_levels(graph, graph.index([x0]))
    if side == "lower":
        return a - b * d
    if side == "upper":
        return a + b * d
    raise InputError("side must be 'upper' or 'lower'")


def cone_property_holds(graph: Graph, C: np.ndarray, x0: int, side: str, tau: float = TAU) -> bool:
    """``Δ∞C >= 0`` (lower cone) or ``<= 0`` (upper cone) at complete vertices other than ``x0``."""
    where = graph.complete & (graph.degree > 0)
    where[graph.pos(x0)] = False
    where &= np.isfinite(C)
    lap = laplacian_field(graph, C, where)
    vals = lap[where]
    return bool(np.all(vals >= -tau)) if side == "lower" else bool(np.all(vals <= tau))


@dataclass
class ProbeReport:
    """Outcome of sampled cone comparisons.

    A violation certifies that ``u`` is not in the class; zero violations
    only means none was found among the samples.
    """

    samples: dict[str, int]
    violations: list[dict]
    skipped: int
    notes: list[str] = field(default_factory=list)

    def passed(self, mode: str | None = None) -> bool:
        return not any(v["mode"] == mode or mode is None for v in self.violations)


def cca_ccb_probe(
    graph: Graph,
    u: np.ndarray,
    subsets: Sequence[Iterable[int]] | None = None,
    *,
    r_max: int = 3,
    apexes: Iterable[int] | None = None,
    slopes: Sequence[float] = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0),
    modes: Sequence[str] = ("cca", "ccb"),
    tol: float = 1e-12,
) -> ProbeReport:
    """Sampled cone comparison from above (CCA) and below (CCB).

    Subsets default to all balls ``B_z(r)``, ``1 <= r <= r_max``, around
    complete vertices. For each subset ``X``, apex ``x0`` outside ``X`` and
    slope ``b``, the cone height ``a`` is taken extremal: the largest ``a``
    with ``u >= a - b d`` on the boundary of ``X`` (CCA), or the smallest
    with ``u <= a + b d`` there (CCB). Every smaller (resp. larger) ``a`` is
    then implied.
    """
    u = np.asarray(u, dtype=float)
    if subsets is None:
        subsets = []
        for z in graph.ids[graph.complete]:
            for r in range(1, r_max + 1):
                B = ball(graph, int(z), r)
                subsets.append(B.value if isinstance(B, TruncationLimited) else B)
    apex_pos = np.arange(graph.n) if apexes is None else graph.index(list(apexes))
    dist_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def dist_from(p0: int):
        if p0 not in dist_cache:
            dist_cache[p0] = distances_from(graph, [int(graph.ids[p0])])
        return dist_cache[p0]

    samples = {m: 0 for m in modes}
    violations = []
    skipped = 0
    notes = []
    seen = set()
    for S in subsets:
        Xm = graph.mask(S)
        key = tuple(np.flatnonzero(Xm))
        if key in seen:
            continue
        seen.add(key)
        if np.any(~graph.complete[Xm]):
            skipped += 1
            continue
        bm = np.zeros(graph.n, dtype=bool)
        for q in np.flatnonzero(Xm):
            bm[graph.neighbor_positions(q)] = True
        bm &= ~Xm
        if not bm.any():
            skipped += 1
            continue
        closure = Xm | bm
        for p0 in apex_pos:
            if Xm[p0]:
                skipped += 1
                continue
            d, lo = dist_from(int(p0))
            if np.any(d[closure] != lo[closure]) or np.any(~np.isfinite(d[closure])):
                skipped += 1
                continue
            for b in slopes:
                for mode in modes:
                    samples[mode] += 1
                    if mode == "cca":
                        a = float(np.min(u[bm] + b * d[bm]))
                        gap = u[closure] - (a - b * d[closure])
                    else:
                        a = float(np.max(u[bm] - b * d[bm]))
                        gap = (a + b * d[closure]) - u[closure]
                    if np.min(gap) < -tol:
                        k = np.flatnonzero(closure)[np.argmin(gap)]
                        violations.append({
                            "mode": mode,
                            "subset": sorted(int(v) for v in graph.ids[Xm]),
                            "apex": int(graph.ids[p0]), "a": a, "b": float(b),
                            "vertex": int(graph.ids[k]), "gap": float(np.min(gap)),
                        })
    if skipped:
        notes.append(f"{skipped} (subset, apex) combinations skipped: apex inside subset, "
                     "incomplete closure, or uncertified distances")
    return ProbeReport(samples, violations, skipped, notes)


# ---------------------------------------------------------------------- #
# finite-ball Liouville probe


@dataclass
class LiouvilleResult:
    certified: bool
    reason: str
    N: int | None = None
    vertex: int | None = None
    cone_gap: float | None = None


def liouville_probe(graph: Graph, u: np.ndarray, x0: int, x1: int, eps: float,
                    tau: float = TAU) -> LiouvilleResult:
    """Certify ``u(x1) >= u(x0) - eps`` for a nonnegative superharmonic ``u``.

    Uses the cone ``u(x0) - (eps/K) d(x0, .)`` with ``K = d(x0, x1)`` on
    ``X = B_{x0}(N) \\ {x0}``, where ``N`` is the smallest radius beyond which
    the cone is nonpositive. Refuses when a hypothesis cannot be verified on
    the exposed graph.
    """
    u = np.asarray(u, dtype=float)
    if eps <= 0:
        raise InputError("eps must be positive")
    p0, p1 = graph.pos(x0), graph.pos(x1)
    d, lo = distances_from(graph, [x0])
    K = d[p1]
    if not np.isfinite(K):
        return LiouvilleResult(False, "x1 is not reachable from x0")
    if K == 0:
        return LiouvilleResult(True, "x1 == x0", N=0, cone_gap=0.0)
    slope = eps / K
    N = max(int(K) + 1, int(math.ceil(u[p0] / slope)))
    closed = d <= N
    inner = d < N
    # every vertex whose neighbors matter must be complete and certified
    inc = inner & ~graph.complete
    if inc.any():
        return LiouvilleResult(False, "ball reaches an incomplete vertex (truncation-limited); "
                               "sup/inf over its neighbors is not available",
                               N=N, vertex=int(graph.ids[np.argmax(inc)]))
    if np.any(d[closed] != lo[closed]):
        return LiouvilleResult(False, "distances inside the ball are not certified "
                               "(truncation-limited)", N=N)
    if np.any(u[closed] < -tau):
        k = np.flatnonzero(closed & (u < -tau))[0]
        return LiouvilleResult(False, "u is negative", N=N, vertex=int(graph.ids[k]))
    lap = laplacian_field(graph, u, inner)
    bad = inner & (lap > tau)
    if bad.any():
        return LiouvilleResult(False, "u is not superharmonic", N=N,
                               vertex=int(graph.ids[np.argmax(bad)]))
    cone = u[p0] - slope * d
    gap = float(np.min(u[closed] - cone[closed]))
    if gap < -tau:
        return LiouvilleResult(False, "cone comparison failed", N=N, cone_gap=gap)
    return LiouvilleResult(True, "certified", N=N, cone_gap=gap)
