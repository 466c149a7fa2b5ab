"""Shared builders and hypothesis strategies for the test suite."""

import numpy as np
from hypothesis import strategies as st

from inflap import DirichletProblem
from inflap.graph import random_connected_graph


def random_problem(rng, n, extra=None, f_kind="zero", boundary_frac=0.3):
    """Connected graph with a random interior, bounded data and finite width."""
    extra = n if extra is None else extra
    g = random_connected_graph(n, extra, rng)
    k = max(1, int(round(boundary_frac * n)))
    Y = rng.choice(n, size=min(k, n - 1), replace=False)
    X = np.setdiff1d(np.arange(n), Y)
    gv = rng.uniform(-3, 3, size=n)
    if f_kind == "zero":
        fv = 0.0
    elif f_kind == "nonneg":
        fv = rng.uniform(0, 1, size=n)
    elif f_kind == "nonpos":
        fv = -rng.uniform(0, 1, size=n)
    else:
        fv = rng.uniform(-1, 1, size=n)
    return DirichletProblem.build(g, X, fv, gv)


@st.composite
def problems(draw, n_min=3, n_max=20, f_kind="zero"):
    n = draw(st.integers(n_min, n_max))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return random_problem(rng, n, extra=draw(st.integers(0, n)), f_kind=f_kind,
                          boundary_frac=draw(st.floats(0.1, 0.6)))


@st.composite
def graphs_and_fields(draw, n_min=2, n_max=20):
    n = draw(st.integers(n_min, n_max))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    g = random_connected_graph(n, draw(st.integers(0, n)), rng)
    u = rng.normal(size=n) * draw(st.floats(0.1, 10))
    return g, u
