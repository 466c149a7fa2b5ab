"""
File formats: graphs, problems, games, fields and run manifests.

JSON output is deterministic: keys are sorted and every float is written with
17 significant digits (``nan`` becomes ``null``, infinities the strings
``"inf"``/``"-inf"``). Vertex-keyed maps use the decimal id as key.

Graph JSON::

    {"vertices": [0, 1, 2], "edges": [[0, 1], [1, 2]],
     "labels": {"0": "a"}, "incomplete": [2]}

Problem JSON adds ``X`` (interior ids), ``g`` and ``f`` maps; game JSON adds
``r``, ``start``, ``max_rounds`` and optionally ``n_games``, ``seed`` and
``strategies``.
"""

from __future__ import annotations

import hashlib
import json
import math
import platform
import re
from importlib import metadata
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InputError
from .graph import Graph
from .problem import DirichletProblem

__all__ = [
    "fmt_float",
    "dumps",
    "write_json",
    "read_json",
    "graph_to_dict",
    "graph_from_dict",
    "problem_to_dict",
    "problem_from_dict",
    "field_to_dict",
    "field_csv",
    "write_field_csv",
    "table_csv",
    "manifest",
    "package_version",
]


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


_MARK = "\x00num:"
_MARK_RE = re.compile('"\\\\u0000num:([^"]*)"')


def _prepare(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _prepare(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_prepare(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return _MARK + format(x, ".17g")
    return obj


def dumps(obj: Any) -> str:
    """Deterministic JSON text with 17-digit floats."""
    text = json.dumps(_prepare(obj), sort_keys=True, indent=2, ensure_ascii=False)
    return _MARK_RE.sub(lambda m: m.group(1), text) + "\n"


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def _as_float(v) -> float:
    if isinstance(v, str):
        if v in ("inf", "-inf"):
            return float(v)
        raise InputError(f"expected a number, got {v!r}")
    if v is None:
        return math.nan
    return float(v)


# ---------------------------------------------------------------------- #
# graphs and problems


def graph_to_dict(graph: Graph) -> dict:
    d: dict = {
        "vertices": graph.ids.tolist(),
        "edges": graph.edge_array().tolist(),
    }
    if graph.labels:
        d["labels"] = {str(k): v for k, v in sorted(graph.labels.items())}
    if graph.is_truncated:
        d["incomplete"] = graph.ids[~graph.complete].tolist()
    return d


def graph_from_dict(d: dict) -> Graph:
    try:
        vertices = [int(v) for v in d["vertices"]]
        edges = [(int(a), int(b)) for a, b in d["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"graph needs 'vertices' and 'edges' as integer lists ({exc})") from None
    labels = {int(k): v for k, v in d.get("labels", {}).items()} or None
    complete = {int(k): False for k in d.get("incomplete", [])} or None
    return Graph(vertices, edges, complete=complete, labels=labels)


def field_to_dict(graph: Graph, u: np.ndarray, mask: np.ndarray | None = None) -> dict[str, float]:
    sel = np.ones(graph.n, dtype=bool) if mask is None else mask
    return {str(int(i)): float(v) for i, v in zip(graph.ids[sel], np.asarray(u)[sel])}


def _id_map(d: dict | None, name: str) -> dict[int, float]:
    if d is None:
        return {}
    if not isinstance(d, dict):
        raise InputError(f"'{name}' must be an object keyed by vertex id")
    try:
        return {int(k): _as_float(v) for k, v in d.items()}
    except ValueError as exc:
        raise InputError(f"'{name}': {exc}") from None


def problem_to_dict(p: DirichletProblem) -> dict:
    g = p.graph
    return {
        "graph": graph_to_dict(g),
        "X": g.ids[p.interior].tolist(),
        "f": field_to_dict(g, p.f, p.interior),
        "g": field_to_dict(g, p.g, p.boundary),
    }


def problem_from_dict(d: dict) -> DirichletProblem:
    """Problem from JSON; a gallery file (with a ``problem`` key) is accepted too."""
    if "problem" in d and isinstance(d["problem"], dict):
        d = d["problem"]
    if "graph" not in d or "X" not in d:
        raise InputError("problem needs 'graph' and 'X'")
    graph = graph_from_dict(d["graph"])
    try:
        X = [int(x) for x in d["X"]]
    except (TypeError, ValueError):
        raise InputError("'X' must be a list of vertex ids") from None
    fmap = _id_map(d.get("f"), "f")
    gmap = _id_map(d.get("g"), "g")
    mask = graph.mask(X)
    missing = [int(v) for v in graph.ids[~mask] if int(v) not in gmap]
    if missing:
        raise InputError(f"'g' has no value for boundary vertices {missing[:5]}")
    fv = graph.field(fmap, default=0.0)
    gv = graph.field(gmap, default=0.0)
    return DirichletProblem.build(graph, mask, fv, gv)


# ---------------------------------------------------------------------- #
# tables


def field_csv(graph: Graph, u: np.ndarray) -> str:
    lines = ["id,value"]
    lines += [f"{int(i)},{fmt_float(float(v))}" for i, v in zip(graph.ids, u)]
    return "\n".join(lines) + "\n"


def write_field_csv(path: str | Path, graph: Graph, u: np.ndarray) -> None:
    Path(path).write_text(field_csv(graph, u), encoding="utf-8")


def table_csv(columns: list[str], rows: list[list]) -> str:
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, (bool, np.bool_)):
            return "true" if v else "false"
        if isinstance(v, (float, np.floating)):
            return fmt_float(float(v))
        return str(v)

    out = [",".join(columns)]
    out += [",".join(cell(v) for v in row) for row in rows]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------- #
# manifests


def package_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def manifest(command: str, inputs: dict[str, bytes], args: dict, seed: int | None = None) -> dict:
    """Reproduction record: input hashes, arguments, seed and library versions."""
    import numba
    import scipy

    return {
        "command": command,
        "inputs": {name: hashlib.sha256(data).hexdigest() for name, data in sorted(inputs.items())},
        "args": args,
        "seed": seed,
        "versions": {
            "artifact": package_version(),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "numba": numba.__version__,
        },
    }
