"""
From Euclidean domains to ε-graphs.

A domain is sampled on a regular grid plus points along its boundary. A
fine neighborhood graph on the samples (radius ``2.5 h``) approximates the
intrinsic metric of the closed domain; whenever the straight segment between
two samples stays inside the closed domain the exact Euclidean length is used
instead. The ε-graph joins samples at intrinsic distance below ``ε`` and
carries the discrete problem ``Δ∞u = ε² f`` on interior samples with ``u = g``
on boundary samples. :func:`convergence_run` solves it along a decreasing ε
schedule and tabulates the quantities that should stabilize.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial import cKDTree

from .calculus import quadratic_profile
from .errors import DomainError, InputError
from .graph import Graph, bfs_levels
from .problem import DirichletProblem

__all__ = [
    "FunctionSpec",
    "DomainSpec",
    "DomainSample",
    "sample_domain",
    "intrinsic_distance",
    "pairs_within",
    "EpsGraphBundle",
    "build_eps_graph",
    "uniform_bound",
    "uniform_bound_check",
    "ConvergenceReport",
    "convergence_run",
]

FINE_RADIUS = 2.5


# ---------------------------------------------------------------------- #
# functions


@dataclass(frozen=True)
class FunctionSpec:
    """A scalar function from a small catalog.

    kinds and parameters:

    * ``constant``: ``value``
    * ``linear``: ``offset``, ``gradient``
    * ``cone``: ``a + b |x - apex|`` with ``a``, ``b``, ``apex``
    * ``poly1d``: ``coeffs`` (highest degree first) in coordinate ``axis``
    * ``table``: 1-D ``x``, ``values`` (optional ``axis``, ``period``) or
      2-D ``x``, ``y``, ``values``
    """

    kind: str
    params: dict = field(default_factory=dict)

    KINDS = ("constant", "linear", "cone", "poly1d", "table")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InputError(f"unknown function kind {self.kind!r}")

    @classmethod
    def constant(cls, value: float) -> "FunctionSpec":
        return cls("constant", {"value": float(value)})

    @classmethod
    def from_dict(cls, d) -> "FunctionSpec":
        if isinstance(d, (int, float)):
            return cls.constant(d)
        d = dict(d)
        return cls(d.pop("kind"), d)

    def as_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        p = self.params
        m = pts.shape[0]
        if self.kind == "constant":
            return np.full(m, float(p.get("value", 0.0)))
        if self.kind == "linear":
            grad = np.atleast_1d(np.asarray(p.get("gradient", 0.0), dtype=float))
            return float(p.get("offset", 0.0)) + pts[:, : grad.size] @ grad
        if self.kind == "cone":
            apex = np.atleast_1d(np.asarray(p.get("apex", 0.0), dtype=float))
            r = np.linalg.norm(pts - apex, axis=1)
            return float(p.get("a", 0.0)) + float(p.get("b", 1.0)) * r
        if self.kind == "poly1d":
            return np.polyval(np.asarray(p["coeffs"], dtype=float), pts[:, int(p.get("axis", 0))])
        if "y" in p:
            interp = RegularGridInterpolator((np.asarray(p["x"]), np.asarray(p["y"])),
                                             np.asarray(p["values"], dtype=float),
                                             bounds_error=False, fill_value=None)
            return interp(pts[:, :2])
        return np.interp(pts[:, int(p.get("axis", 0))], np.asarray(p["x"], dtype=float),
                         np.asarray(p["values"], dtype=float), period=p.get("period"))

    def sup_norm_on(self, pts: np.ndarray) -> float:
        v = self(pts)
        return float(np.max(np.abs(v))) if v.size else 0.0


# ---------------------------------------------------------------------- #
# shapes


class _Shape:
    dim: int
    periods: np.ndarray

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def contains(self, pts: np.ndarray, tol: float) -> np.ndarray:
        raise NotImplementedError

    def boundary_points(self, h: float) -> np.ndarray:
        raise NotImplementedError

    def segment_inside(self, a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
        """Whether each segment ``a[k] -> b[k]`` (unwrapped) lies in the closed domain."""
        return np.ones(len(a), dtype=bool)

    def grid_axes(self, h: float) -> list[np.ndarray]:
        lo, hi = self.bbox()
        axes = []
        for k in range(self.dim):
            if self.periods[k] > 0:
                n = math.ceil(self.periods[k] / h - 1e-9)
                axes.append(lo[k] + np.arange(n) * (self.periods[k] / n))
            else:
                n = math.floor((hi[k] - lo[k]) / h + 1e-9)
                axes.append(lo[k] + np.arange(n + 1) * h)
        return axes


def _polyline(vertices: np.ndarray, h: float, closed: bool) -> np.ndarray:
    pts = []
    nv = len(vertices)
    for k in range(nv if closed else nv - 1):
        a, b = vertices[k], vertices[(k + 1) % nv]
        n = max(1, math.ceil(np.linalg.norm(b - a) / h - 1e-9))
        t = np.arange(n) / n
        pts.append(a + t[:, None] * (b - a))
    if not closed:
        pts.append(vertices[-1:])
    return np.vstack(pts)


class _Box(_Shape):
    def __init__(self, lo, hi):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if self.lo.shape != self.hi.shape or self.lo.size not in (1, 2) or np.any(self.hi <= self.lo):
            raise InputError("box needs lo < hi in one or two dimensions")
        self.dim = self.lo.size
        self.periods = np.zeros(self.dim)

    def bbox(self):
        return self.lo, self.hi

    def contains(self, pts, tol):
        return np.all((pts >= self.lo - tol) & (pts <= self.hi + tol), axis=1)

    def boundary_points(self, h):
        if self.dim == 1:
            return np.array([[self.lo[0]], [self.hi[0]]])
        (x0, y0), (x1, y1) = self.lo, self.hi
        return _polyline(np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]), h, True)


class _Annulus(_Shape):
    dim = 2

    def __init__(self, center=(0.0, 0.0), r_in=0.5, r_out=1.0):
        self.c = np.asarray(center, dtype=float)
        self.r_in, self.r_out = float(r_in), float(r_out)
        if not 0 < self.r_in < self.r_out:
            raise InputError("annulus needs 0 < r_in < r_out")
        self.periods = np.zeros(2)

    def bbox(self):
        return self.c - self.r_out, self.c + self.r_out

    def contains(self, pts, tol):
        r = np.linalg.norm(pts - self.c, axis=1)
        return (r >= self.r_in - tol) & (r <= self.r_out + tol)

    def boundary_points(self, h):
        out = []
        for r in (self.r_in, self.r_out):
            n = math.ceil(2 * math.pi * r / h)
            t = 2 * math.pi * np.arange(n) / n
            out.append(self.c + r * np.column_stack([np.cos(t), np.sin(t)]))
        return np.vstack(out)

    def segment_inside(self, a, b, tol):
        d = b - a
        L2 = np.einsum("ij,ij->i", d, d)
        t = np.clip(np.einsum("ij,ij->i", self.c - a, d) / np.where(L2 > 0, L2, 1.0), 0.0, 1.0)
        closest = a + t[:, None] * d
        return np.linalg.norm(closest - self.c, axis=1) >= self.r_in - tol


class _LShape(_Shape):
    """``[0, L]^2`` with the open square ``(a, L] x (a, L]`` removed."""

    dim = 2

    def __init__(self, size=2.0, notch=1.0):
        self.L, self.a = float(size), float(notch)
        if not 0 < self.a < self.L:
            raise InputError("l_shape needs 0 < notch < size")
        self.periods = np.zeros(2)

    def bbox(self):
        return np.zeros(2), np.full(2, self.L)

    def contains(self, pts, tol):
        inbox = np.all((pts >= -tol) & (pts <= self.L + tol), axis=1)
        notch = (pts[:, 0] > self.a + tol) & (pts[:, 1] > self.a + tol)
        return inbox & ~notch

    def boundary_points(self, h):
        L, a = self.L, self.a
        return _polyline(np.array([[0, 0], [L, 0], [L, a], [a, a], [a, L], [0, L]], float), h, True)

    def segment_inside(self, a, b, tol):
        # The segment leaves the domain iff it spends positive length with x > a and y > a.
        lo = np.zeros(len(a))
        hi = np.ones(len(a))
        for k in range(2):
            p, q = a[:, k] - (self.a + tol), b[:, k] - (self.a + tol)
            d = q - p
            with np.errstate(divide="ignore", invalid="ignore"):
                t0 = np.where(d != 0, -p / d, np.where(p > 0, -np.inf, np.inf))
            # set where p + t d > 0
            lo = np.where(d > 0, np.maximum(lo, t0), lo)
            hi = np.where(d < 0, np.minimum(hi, t0), hi)
            dead = (d == 0) & (p <= 0)
            hi = np.where(dead, -1.0, hi)
        return hi - lo <= 1e-12


class _Slab(_Shape):
    """``{f1(x) < y < f2(x)}`` periodic in ``x`` with period ``P``."""

    dim = 2

    def __init__(self, period, x, lower, upper):
        self.P = float(period)
        self.xs = np.asarray(x, dtype=float)
        self.f1 = np.asarray(lower, dtype=float)
        self.f2 = np.asarray(upper, dtype=float)
        if not (self.xs.shape == self.f1.shape == self.f2.shape) or np.any(self.f2 <= self.f1):
            raise InputError("slab needs tabulated lower < upper on a common x grid")
        self.periods = np.array([self.P, 0.0])

    def lower(self, x):
        return np.interp(x, self.xs, self.f1, period=self.P)

    def upper(self, x):
        return np.interp(x, self.xs, self.f2, period=self.P)

    def bbox(self):
        return np.array([0.0, self.f1.min()]), np.array([self.P, self.f2.max()])

    def contains(self, pts, tol):
        x = np.mod(pts[:, 0], self.P)
        return (pts[:, 1] >= self.lower(x) - tol) & (pts[:, 1] <= self.upper(x) + tol)

    def boundary_points(self, h):
        out = []
        for fn in (self.lower, self.upper):
            xf = np.linspace(0, self.P, 4096, endpoint=False)
            yf = fn(xf)
            seg = np.hypot(np.diff(np.append(xf, self.P)), np.diff(np.append(yf, yf[0])))
            s = np.concatenate([[0.0], np.cumsum(seg)])
            n = math.ceil(s[-1] / h)
            xb = np.interp(np.arange(n) * s[-1] / n, s, np.append(xf, self.P))
            out.append(np.column_stack([np.mod(xb, self.P), fn(xb)]))
        return np.vstack(out)

    def segment_inside(self, a, b, tol):
        m = 16
        t = np.linspace(0, 1, m)
        ok = np.ones(len(a), dtype=bool)
        for s in t:
            ok &= self.contains(a + s * (b - a), tol)
        return ok


class _Punctured(_Shape):
    """Periodic window ``[0, k s)^2`` of the plane minus the lattice ``s Z^2``."""

    dim = 2

    def __init__(self, spacing=1.0, cells=3):
        self.s, self.k = float(spacing), int(cells)
        if self.s <= 0 or self.k < 1:
            raise InputError("punctured_box needs spacing > 0 and cells >= 1")
        self.periods = np.full(2, self.s * self.k)

    def bbox(self):
        return np.zeros(2), np.full(2, self.s * self.k)

    def contains(self, pts, tol):
        return np.ones(len(pts), dtype=bool)

    def boundary_points(self, h):
        i = np.arange(self.k) * self.s
        X, Y = np.meshgrid(i, i, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])

    def grid_axes(self, h):
        n = math.ceil(self.s / h - 1e-9) * self.k
        return [np.arange(n) * (self.s * self.k / n)] * 2


_SHAPES = {
    "box": lambda p: _Box(p["lo"], p["hi"]),
    "annulus": lambda p: _Annulus(p.get("center", (0.0, 0.0)), p["r_in"], p["r_out"]),
    "l_shape": lambda p: _LShape(p.get("size", 2.0), p.get("notch", 1.0)),
    "slab_between_graphs": lambda p: _Slab(p["period"], p["x"], p["lower"], p["upper"]),
    "punctured_box": lambda p: _Punctured(p.get("spacing", 1.0), p.get("cells", 3)),
}


@dataclass(frozen=True)
class DomainSpec:
    """Shape, right-hand side ``f`` and boundary data ``g`` of a Euclidean problem.

    Periodic shapes (``slab_between_graphs`` in ``x``, ``punctured_box`` in
    both axes) stand in for unbounded domains of finite width.
    """

    shape: str
    params: dict
    f: FunctionSpec = FunctionSpec.constant(0.0)
    g: FunctionSpec = FunctionSpec.constant(0.0)

    def __post_init__(self):
        if self.shape not in _SHAPES:
            raise InputError(f"unknown shape {self.shape!r}; expected one of {sorted(_SHAPES)}")
        try:
            object.__setattr__(self, "_geom", _SHAPES[self.shape](self.params))
        except KeyError as exc:
            raise InputError(f"{self.shape} is missing parameter {exc}") from None

    @property
    def geometry(self) -> _Shape:
        return self._geom

    @property
    def dim(self) -> int:
        return self._geom.dim

    @classmethod
    def from_dict(cls, d: dict) -> "DomainSpec":
        d = dict(d)
        shape = d.pop("shape")
        f = FunctionSpec.from_dict(d.pop("f", 0.0))
        g = FunctionSpec.from_dict(d.pop("g", 0.0))
        return cls(shape, d, f, g)

    def as_dict(self) -> dict:
        return {"shape": self.shape, **self.params, "f": self.f.as_dict(), "g": self.g.as_dict()}


# ---------------------------------------------------------------------- #
# sampling


def _displacement(a: np.ndarray, b: np.ndarray, periods: np.ndarray) -> np.ndarray:
    d = b - a
    for k, P in enumerate(periods):
        if P > 0:
            d[:, k] -= P * np.round(d[:, k] / P)
    return d


@dataclass(eq=False)
class DomainSample:
    """Sample points of a closed domain with a fine graph for intrinsic distances.

    ``points[is_boundary]`` lie on the boundary. ``probe`` indexes the extra
    interior points that were requested explicitly.
    """

    spec: DomainSpec
    h: float
    points: np.ndarray
    is_boundary: np.ndarray
    fine: object
    boundary_distance: np.ndarray
    width: float
    probe: np.ndarray
    dropped: int = 0
    _tree: cKDTree | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def interior(self) -> np.ndarray:
        return ~self.is_boundary

    @property
    def periods(self) -> np.ndarray:
        return self.spec.geometry.periods

    @property
    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = _kdtree(self.points, self.periods)
        return self._tree

    def omega_r(self, r: float) -> np.ndarray:
        """Interior samples at intrinsic distance greater than ``r`` from the boundary."""
        return self.interior & (self.boundary_distance > r)

    def euclidean(self, i, j) -> np.ndarray:
        i, j = np.atleast_1d(i), np.atleast_1d(j)
        return np.linalg.norm(_displacement(self.points[i], self.points[j], self.periods), axis=1)

    def segment_inside(self, i, j) -> np.ndarray:
        i, j = np.atleast_1d(i), np.atleast_1d(j)
        a = self.points[i]
        b = a + _displacement(a, self.points[j], self.periods)
        return self.spec.geometry.segment_inside(a, b, 1e-9 + 1e-6 * self.h)


def _kdtree(points: np.ndarray, periods: np.ndarray) -> cKDTree:
    if not np.any(periods > 0):
        return cKDTree(points)
    lo = points.min(axis=0)
    span = points.max(axis=0) - lo
    box = np.where(periods > 0, periods, 4 * span + 1.0)
    shifted = np.where(periods > 0, np.mod(points, np.where(periods > 0, periods, 1.0)), points - lo)
    return cKDTree(shifted, boxsize=box)


def _fine_graph(points, periods, geom, h):
    tree = _kdtree(points, periods)
    pairs = tree.query_pairs(FINE_RADIUS * h * (1 + 1e-9), output_type="ndarray")
    a = points[pairs[:, 0]]
    b = a + _displacement(a, points[pairs[:, 1]], periods)
    keep = geom.segment_inside(a, b, 1e-9 + 1e-6 * h)
    pairs = pairs[keep]
    w = np.linalg.norm(b[keep] - a[keep], axis=1)
    n = len(points)
    W = coo_matrix((np.concatenate([w, w]),
                    (np.concatenate([pairs[:, 0], pairs[:, 1]]),
                     np.concatenate([pairs[:, 1], pairs[:, 0]]))), shape=(n, n)).tocsr()
    return W, tree


def sample_domain(spec: DomainSpec, h: float, extra_points: np.ndarray | None = None) -> DomainSample:
    """Grid of spacing ``h`` restricted to the domain, plus boundary samples.

    Boundary samples lie along the boundary at arc spacing at most ``h``.
    Interior grid points closer than ``h/4`` to a boundary sample or to an
    extra point are dropped to avoid near-duplicates. If the fine graph is
    disconnected the component holding most samples is kept with a warning.
    """
    if not h > 0:
        raise InputError("h must be positive")
    geom = spec.geometry
    tol = 1e-9 + 1e-6 * h
    axes = geom.grid_axes(h)
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, geom.dim)
    bpts = geom.boundary_points(h)
    btree = _kdtree(bpts, geom.periods)
    dup = btree.query_pairs(1e-6 * h, output_type="ndarray")
    if len(dup):
        bpts = np.delete(bpts, np.unique(dup[:, 1]), axis=0)
        btree = _kdtree(bpts, geom.periods)

    inside = geom.contains(grid, -tol) if spec.shape != "punctured_box" else np.ones(len(grid), bool)
    grid = grid[inside]
    near_b = btree.query(_wrap(grid, geom.periods), distance_upper_bound=h / 4)[0] < np.inf
    grid = grid[~near_b]

    extra = np.zeros((0, geom.dim)) if extra_points is None else np.atleast_2d(np.asarray(extra_points, float))
    if len(extra):
        if not np.all(geom.contains(extra, -tol)):
            raise InputError("extra points must lie strictly inside the domain")
        if np.any(btree.query(_wrap(extra, geom.periods))[0] < 1e-9):
            raise InputError("extra points must not coincide with boundary samples")
        etree = _kdtree(extra, geom.periods)
        near_e = etree.query(_wrap(grid, geom.periods), distance_upper_bound=h / 4)[0] < np.inf
        grid = grid[~near_e]

    points = np.vstack([extra, grid, bpts])
    is_b = np.zeros(len(points), dtype=bool)
    is_b[len(extra) + len(grid):] = True
    if not np.any(~is_b):
        raise DomainError("sample has no interior points; decrease h")

    W, tree = _fine_graph(points, geom.periods, geom, h)
    ncomp, lab = connected_components(W, directed=False)
    dropped = 0
    if ncomp > 1:
        big = np.argmax(np.bincount(lab))
        keep = lab == big
        if np.any(~keep[: len(extra)]):
            raise DomainError("an extra point is disconnected from the main sample component")
        dropped = int(np.sum(~keep))
        warnings.warn(f"fine sample graph has {ncomp} components; keeping the largest, "
                      f"dropping {dropped} samples", stacklevel=2)
        points, is_b = points[keep], is_b[keep]
        W = W[keep][:, keep]
        tree = None
    if not is_b.any():
        raise DomainError("sample component has no boundary samples")
    bdist = dijkstra(W, directed=False, indices=np.flatnonzero(is_b), min_only=True)
    if not np.all(np.isfinite(bdist)):
        raise DomainError("some interior samples cannot reach the boundary")
    width = float(np.max(bdist[~is_b]))
    return DomainSample(spec, float(h), points, is_b, W, bdist, width,
                        np.arange(len(extra)), dropped, tree)


def _wrap(pts: np.ndarray, periods: np.ndarray) -> np.ndarray:
    if not np.any(periods > 0):
        return pts
    lo = pts.min(axis=0)
    return np.where(periods > 0, np.mod(pts, np.where(periods > 0, periods, 1.0)), pts - lo)


# ---------------------------------------------------------------------- #
# intrinsic distances


def _grid_distances(sample: DomainSample, sources: np.ndarray, limit: float = np.inf,
                    chunk: int = 512) -> np.ndarray:
    rows = []
    for lo in range(0, len(sources), chunk):
        rows.append(dijkstra(sample.fine, directed=False, indices=sources[lo: lo + chunk], limit=limit))
    return np.vstack(rows) if rows else np.zeros((0, sample.n))


def intrinsic_distance(sample: DomainSample, x: int, y: int, method: str = "auto") -> float:
    """Intrinsic distance between samples ``x`` and ``y`` (indices into ``points``).

    ``auto`` returns the Euclidean length when the segment stays in the
    closed domain and the fine-graph shortest path otherwise; ``grid`` and
    ``segment`` force one route. Unreachable pairs give ``inf``.
    """
    if x == y:
        return 0.0
    if method not in ("auto", "grid", "segment"):
        raise InputError(f"unknown method {method!r}")
    if method == "segment" or (method == "auto" and sample.segment_inside(x, y)[0]):
        if method == "segment" and not sample.segment_inside(x, y)[0]:
            raise DomainError("segment leaves the closed domain")
        return float(sample.euclidean(x, y)[0])
    return float(_grid_distances(sample, np.array([x]))[0, y])


# pairs closer than radius by less than this relative margin count as "at" the
# radius, so grid points an exact multiple of h apart behave the same everywhere
STRICT_MARGIN = 1e-9


def pairs_within(sample: DomainSample, radius: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All pairs ``i < j`` with intrinsic distance strictly below ``radius``."""
    cand = sample.tree.query_pairs(radius, output_type="ndarray")
    if len(cand) == 0:
        return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
    i, j = cand[:, 0], cand[:, 1]
    d = sample.euclidean(i, j)
    ok = sample.segment_inside(i, j)
    bent = np.flatnonzero(~ok)
    if bent.size:
        src, inv = np.unique(i[bent], return_inverse=True)
        D = _grid_distances(sample, src, limit=radius)
        d[bent] = D[inv, j[bent]]
    keep = d < radius * (1 - STRICT_MARGIN)
    return i[keep], j[keep], d[keep]


# ---------------------------------------------------------------------- #
# ε-graphs


@dataclass(eq=False)
class EpsGraphBundle:
    """ε-graph of a sample with its Dirichlet problem ``Δ∞u = rhs_sign ε² f``."""

    eps: float
    sample: DomainSample
    graph: Graph
    problem: DirichletProblem
    edges: np.ndarray
    edge_length: np.ndarray
    W: float
    W_i: int
    graph_width: int | float | None
    rhs_sign: int
    f_values: np.ndarray
    hop_check: dict = field(default_factory=dict)


def _hop_check(sample, graph, eps, n_sources=8, seed=0) -> dict:
    rng = np.random.default_rng(seed)
    interior = np.flatnonzero(sample.interior)
    src = np.sort(rng.choice(interior, size=min(n_sources, interior.size), replace=False))
    D = _grid_distances(sample, src)
    exact = total = 0
    worst = 0
    for k, s in enumerate(src):
        hops = bfs_levels(graph, np.array([s]))
        d = D[k]
        ok = np.isfinite(d) & np.isfinite(hops) & (np.arange(sample.n) != s)
        # the fine-graph path overestimates the intrinsic length slightly
        predicted = np.floor(d[ok] / eps) + 1
        diff = hops[ok] - predicted
        exact += int(np.sum(diff == 0))
        total += int(ok.sum())
        worst = max(worst, int(np.max(np.abs(diff))) if diff.size else 0)
    return {"pairs": total, "exact_fraction": exact / total if total else 1.0, "max_abs_deviation": worst}


def build_eps_graph(sample: DomainSample, eps: float, f: FunctionSpec | None = None,
                    g: FunctionSpec | None = None, rhs_sign: int = 1, hop_check: bool = True) -> EpsGraphBundle:
    """Join samples at intrinsic distance ``< eps`` and set up ``Δ∞u = rhs_sign ε² f``."""
    if sample.h > eps / 10 * (1 + 1e-9):
        raise InputError(f"sample spacing {sample.h:g} exceeds eps/10 = {eps / 10:g}")
    if rhs_sign not in (1, -1):
        raise InputError("rhs_sign must be +1 or -1")
    f = sample.spec.f if f is None else f
    g = sample.spec.g if g is None else g
    i, j, d = pairs_within(sample, eps)
    deg = np.bincount(np.concatenate([i, j]), minlength=sample.n)
    lonely = np.flatnonzero((deg == 0) & sample.interior)
    if lonely.size:
        raise DomainError(f"{lonely.size} interior samples have no neighbor at eps={eps:g}")
    graph = Graph(np.arange(sample.n), np.column_stack([i, j]))
    fv = f(sample.points)
    gv = g(sample.points)
    X = sample.interior
    problem = DirichletProblem.build(graph, X, np.where(X, rhs_sign * eps**2 * fv, 0.0),
                                     np.where(X, 0.0, gv))
    W = sample.width
    W_i = int(math.floor(W / eps)) + 1
    hc = _hop_check(sample, graph, eps) if hop_check else {}
    return EpsGraphBundle(eps, sample, graph, problem, np.column_stack([i, j]), d, W, W_i,
                          problem.width, rhs_sign, np.where(X, fv, 0.0), hc)


def uniform_bound(bundle: EpsGraphBundle) -> float:
    """Max over ``0..W_i`` of ``a + b r - c r (r-1) / 2`` with the a-priori constants.

    ``a = ||g||``, ``b = W_i ε² ||f||``, ``c = ε² ||f||``.
    """
    p = bundle.problem
    c = p.f_norm
    r = np.arange(bundle.W_i + 1)
    return float(np.max(quadratic_profile(r, p.g_norm, bundle.W_i * c, c, "upper")))


def uniform_bound_check(bundle: EpsGraphBundle, u, tol: float = 1e-7) -> bool:
    """Whether ``||u||`` stays below :func:`uniform_bound` up to ``tol``.

    On one-dimensional samples the discrete solution can coincide with the
    bound, so ``tol`` must absorb the error of the iterative solve.
    """
    u = getattr(u, "u", u)
    return bool(np.max(np.abs(u)) <= uniform_bound(bundle) + tol)


# ---------------------------------------------------------------------- #
# convergence


@dataclass
class ConvergenceReport:
    """Per-ε tables and cross-ε Cauchy differences of a convergence run.

    ``modulus[k][r][δ]`` is the largest ``|u(x) - u(y)|`` over samples in
    ``Ω_r`` with intrinsic distance below ``δ`` at level ``k`` (``None`` when
    ``δ > ε`` at that level, since such pairs are not enumerated).
    ``C_r[k][r]`` is the same quantity for ``δ = ε`` divided by ``ε``.
    ``boundary[k][δ]`` is the largest ``|u(x) - g(y0)|`` over boundary probes
    ``y0`` and samples within ``δ``; the ``"eps"`` key couples ``δ = ε``.
    """

    spec: DomainSpec
    eps: list[float]
    h: list[float]
    r_grid: list[float]
    delta_grid: list[float]
    levels: list[dict]
    cauchy: list[float | None]
    probe_points: np.ndarray

    def ok_levels(self) -> list[dict]:
        return [lv for lv in self.levels if "failure" not in lv]

    def column(self, key: str) -> list:
        return [lv.get(key) for lv in self.levels]

    def as_dict(self) -> dict:
        return {
            "domain": self.spec.as_dict(),
            "eps": self.eps,
            "h": self.h,
            "r_grid": self.r_grid,
            "delta_grid": self.delta_grid,
            "levels": self.levels,
            "cauchy": self.cauchy,
            "n_probe": int(len(self.probe_points)),
        }

    def table_rows(self) -> tuple[list[str], list[list]]:
        """Flat CSV table, one row per ε."""
        cols = ["eps", "h", "n_samples", "residual", "sup_norm", "bound", "bound_ok", "error", "cauchy"]
        cols += [f"C_r[{r:g}]" for r in self.r_grid]
        cols += [f"boundary[{d:g}]" for d in self.delta_grid] + ["boundary[eps]"]
        rows = []
        for k, lv in enumerate(self.levels):
            row = [self.eps[k], self.h[k], lv.get("n_samples"), lv.get("residual"), lv.get("sup_norm"),
                   lv.get("bound"), lv.get("bound_ok"), lv.get("error"), self.cauchy[k]]
            row += [lv.get("C_r", {}).get(_key(r)) for r in self.r_grid]
            bt = lv.get("boundary", {})
            row += [bt.get(_key(d)) for d in self.delta_grid] + [bt.get("eps")]
            rows.append(row)
        return cols, rows


def _key(x: float) -> str:
    return format(float(x), ".6g")


def _default_probe(spec: DomainSpec, h0: float) -> np.ndarray:
    # every interior sample of the coarsest level, boundary layer included
    s = sample_domain(spec, h0)
    return s.points[s.interior]


def _boundary_probes(spec: DomainSpec, eps0: float, n: int) -> np.ndarray:
    b = spec.geometry.boundary_points(eps0 / 2)
    step = max(1, math.ceil(len(b) / n))
    return b[::step]


def convergence_run(
    spec: DomainSpec,
    eps_schedule: Sequence[float],
    h_rule: Callable[[float], float] | None = None,
    exact: FunctionSpec | Callable[[np.ndarray], np.ndarray] | None = None,
    *,
    probe_points: np.ndarray | None = None,
    r_grid: Sequence[float] | None = None,
    delta_grid: Sequence[float] | None = None,
    n_boundary_probes: int = 16,
    rhs_sign: int = 1,
    tol: float = 1e-10,
    max_samples: int | None = None,
) -> ConvergenceReport:
    """Solve the ε-graph problems along a decreasing schedule and tabulate them.

    ``h_rule`` defaults to ``eps / 20``. A failed level is recorded with a
    ``failure`` entry and the run continues.
    """
    from .solver import solve

    eps_schedule = [float(e) for e in eps_schedule]
    if len(eps_schedule) < 1 or any(b >= a for a, b in zip(eps_schedule, eps_schedule[1:])):
        raise InputError("eps schedule must be strictly decreasing")
    h_rule = h_rule or (lambda e: e / 20)
    hs = [float(h_rule(e)) for e in eps_schedule]
    for e, h in zip(eps_schedule, hs):
        if h > e / 10 * (1 + 1e-9):
            raise InputError(f"h_rule({e:g}) = {h:g} exceeds eps/10")
    probe = _default_probe(spec, hs[0]) if probe_points is None else np.atleast_2d(probe_points)
    bprobe = _boundary_probes(spec, eps_schedule[0], n_boundary_probes)
    r_grid = [float(r) for r in (r_grid if r_grid is not None else ())]
    delta_grid = sorted(float(d) for d in (delta_grid if delta_grid is not None else eps_schedule))

    levels: list[dict] = []
    probe_vals: list[np.ndarray | None] = []
    for eps, h in zip(eps_schedule, hs):
        lv: dict = {"eps": eps, "h": h}
        try:
            sample = sample_domain(spec, h, probe)
            lv["n_samples"] = sample.n
            if max_samples is not None and sample.n > max_samples:
                raise DomainError(f"{sample.n} samples exceed the cap of {max_samples}")
            bundle = build_eps_graph(sample, eps, rhs_sign=rhs_sign)
            out = solve(bundle.problem, tol=tol)
        except Exception as exc:  # noqa: BLE001 - recorded in the report
            lv["failure"] = f"{type(exc).__name__}: {exc}"
            levels.append(lv)
            probe_vals.append(None)
            continue
        u = out.u
        lv.update(_level_tables(bundle, out, u, r_grid, delta_grid, bprobe))
        if not out.converged:
            lv["failure"] = f"solver did not converge in {out.iterations} iterations"
        if exact is not None:
            ex = exact(sample.points)
            lv["error"] = float(np.max(np.abs(u[sample.probe] - ex[sample.probe])))
            lv["error_all"] = float(np.max(np.abs(u - ex)))
        probe_vals.append(u[sample.probe].copy())
        levels.append(lv)

    cauchy: list[float | None] = [None]
    for a, b in zip(probe_vals, probe_vals[1:]):
        cauchy.append(None if a is None or b is None else float(np.max(np.abs(a - b))))
    return ConvergenceReport(spec, eps_schedule, hs, r_grid, delta_grid, levels, cauchy, probe)


def _level_tables(bundle: EpsGraphBundle, out, u, r_grid, delta_grid, bprobe) -> dict:
    s = bundle.sample
    eps = bundle.eps
    i, j = bundle.edges[:, 0], bundle.edges[:, 1]
    d = bundle.edge_length
    du = np.abs(u[i] - u[j])
    lv = {
        "n_samples": s.n,
        "n_interior": int(s.interior.sum()),
        "n_edges": int(len(i)),
        "iterations": out.iterations,
        "residual": float(out.residual),
        "sup_norm": float(np.max(np.abs(u))),
        "W": bundle.W,
        "W_i": bundle.W_i,
        "graph_width": bundle.graph_width,
        "bound": uniform_bound(bundle),
        "hop_check": bundle.hop_check,
    }
    lv["bound_ok"] = uniform_bound_check(bundle, u)
    mod, C = {}, {}
    for r in r_grid:
        inside = s.omega_r(r)
        both = inside[i] & inside[j]
        row = {}
        for delta in delta_grid:
            if delta > eps * (1 + 1e-12):
                row[_key(delta)] = None
                continue
            sel = both & (d < delta * (1 - STRICT_MARGIN))
            row[_key(delta)] = float(du[sel].max()) if sel.any() else None
        sel = both
        C[_key(r)] = float(du[sel].max() / eps) if sel.any() else None
        mod[_key(r)] = row
    lv["modulus"] = mod
    lv["C_r"] = C

    # boundary attainment: nearest boundary sample to each boundary probe
    bidx = np.flatnonzero(s.is_boundary)
    tb = _kdtree(s.points[bidx], s.periods)
    _, near = tb.query(_wrap(bprobe, s.periods) if np.any(s.periods > 0) else bprobe)
    y0 = np.unique(bidx[near])
    gval = bundle.problem.g
    is_y0 = np.zeros(s.n, dtype=bool)
    is_y0[y0] = True
    table = {}
    for delta in list(delta_grid) + ["eps"]:
        dl = eps if delta == "eps" else delta
        key = "eps" if delta == "eps" else _key(delta)
        if dl > eps * (1 + 1e-12):
            table[key] = None
            continue
        vals = []
        for a, b in ((i, j), (j, i)):
            sel = is_y0[a] & s.interior[b] & (d < dl * (1 - STRICT_MARGIN))
            if sel.any():
                vals.append(np.max(np.abs(u[b[sel]] - gval[a[sel]])))
        table[key] = float(max(vals)) if vals else None
    lv["boundary"] = table
    return lv
