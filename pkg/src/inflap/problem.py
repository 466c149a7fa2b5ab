"""Dirichlet problems for the discrete infinity Laplacian."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import InputError, PreconditionError
from .graph import Graph, TruncationLimited, distances_from, width_of

__all__ = ["Partition", "DirichletProblem"]


@dataclass(frozen=True)
class Partition:
    """Interior/boundary split of a graph's vertices.

    ``width_bound`` is ``None`` when the width is unknown (truncated graphs)
    and ``math.inf`` when some interior vertex cannot reach the boundary.
    """

    interior: np.ndarray
    width_bound: float | int | None
    width_lower_bound: float

    @property
    def boundary(self) -> np.ndarray:
        return ~self.interior

    @classmethod
    def from_interior(cls, graph: Graph, X: Iterable[int] | np.ndarray) -> "Partition":
        if isinstance(X, np.ndarray) and X.dtype == bool:
            interior = X.copy()
        else:
            interior = graph.mask(X)
        if not interior.any():
            raise InputError("interior set X is empty")
        if interior.all():
            return cls(interior, math.inf, math.inf)
        # The boundary data lives on all of V \ X, so distances are taken from it.
        dist, lower = distances_from(graph, graph.ids[~interior], sources_complete=not graph.is_truncated)
        w = float(np.max(dist[interior]))
        lo = float(np.max(lower[interior]))
        if w == lo:
            width = math.inf if np.isinf(w) else int(w)
        else:
            width = None
        return cls(interior, width, lo)


def _as_values(graph: Graph, spec, mask: np.ndarray, name: str) -> np.ndarray:
    if spec is None:
        return np.zeros(graph.n)
    if callable(spec):
        out = np.zeros(graph.n)
        for p in np.flatnonzero(mask):
            out[p] = float(spec(int(graph.ids[p])))
        return out
    if isinstance(spec, Mapping):
        out = graph.field(spec, default=np.nan)
    elif np.isscalar(spec):
        out = np.full(graph.n, float(spec))
    else:
        out = np.asarray(spec, dtype=float).copy()
        if out.shape != (graph.n,):
            raise InputError(f"{name} array must have one entry per vertex")
    if np.any(~np.isfinite(out[mask])):
        raise InputError(f"{name} must be finite on its whole domain")
    out[~mask] = 0.0
    return out


@dataclass(eq=False)
class DirichletProblem:
    """``Δ∞u = f`` on the interior ``X``, ``u = g`` on ``Y = V \\ X``.

    ``f`` and ``g`` are stored as full-length arrays (zero off their domain).
    """

    graph: Graph
    partition: Partition
    f: np.ndarray
    g: np.ndarray
    labels: dict = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        graph: Graph,
        X: Iterable[int] | np.ndarray,
        f: Mapping[int, float] | Callable[[int], float] | np.ndarray | float | None = None,
        g: Mapping[int, float] | Callable[[int], float] | np.ndarray | float | None = None,
    ) -> "DirichletProblem":
        part = Partition.from_interior(graph, X)
        fv = _as_values(graph, f, part.interior, "f")
        gv = _as_values(graph, g, ~part.interior, "g")
        return cls(graph, part, fv, gv)

    @property
    def interior(self) -> np.ndarray:
        return self.partition.interior

    @property
    def boundary(self) -> np.ndarray:
        return ~self.partition.interior

    @property
    def width(self):
        return self.partition.width_bound

    @property
    def f_norm(self) -> float:
        return float(np.max(np.abs(self.f[self.interior]), initial=0.0))

    @property
    def g_norm(self) -> float:
        return float(np.max(np.abs(self.g[self.boundary]), initial=0.0))

    def f_sign(self) -> int:
        """+1 if f >= 0, -1 if f <= 0 (0 counts as both, giving +1), 0 if it changes sign."""
        fx = self.f[self.interior]
        if np.all(fx >= 0):
            return 1
        if np.all(fx <= 0):
            return -1
        return 0

    def require_finite_width(self) -> int:
        w = self.partition.width_bound
        if w is None:
            raise PreconditionError(
                "width of the interior is unknown on this truncated graph "
                f"(certified lower bound {self.partition.width_lower_bound:g})"
            )
        if math.isinf(w):
            raise PreconditionError(
                "the interior has infinite width (some interior vertex cannot reach "
                "the boundary); bounded solutions need not exist"
            )
        return int(w)

    def require_complete_interior(self) -> None:
        bad = self.interior & ~self.graph.complete
        if bad.any():
            from .errors import TruncationError
            raise TruncationError(
                f"interior vertex {int(self.graph.ids[np.argmax(bad)])} has an incomplete neighborhood"
            )

    def boundary_field(self) -> np.ndarray:
        """Array equal to ``g`` on ``Y`` and zero on ``X``."""
        return np.where(self.boundary, self.g, 0.0)

    def with_data(self, f=None, g=None) -> "DirichletProblem":
        """Same graph and partition, new right-hand side and/or boundary data."""
        fv = self.f if f is None else _as_values(self.graph, f, self.interior, "f")
        gv = self.g if g is None else _as_values(self.graph, g, self.boundary, "g")
        return DirichletProblem(self.graph, self.partition, fv, gv, dict(self.labels))
