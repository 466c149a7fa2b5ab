import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session", autouse=True)
def _warm_jit():
    # compile the solver kernels once so timing assertions measure the solve only
    from inflap import DirichletProblem, solve
    from inflap.graph import path_graph

    p = DirichletProblem.build(path_graph(3), [1], 0.0, {0: 0.0, 2: 1.0})
    solve(p)
    solve(p, scheme="gauss_seidel")
    solve(p, debug=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "summary_lines", None)
    if mod is None or lines is None:
        return
    out = lines()
    if out:
        terminalreporter.section("acceptance criteria")
        for line in out:
            terminalreporter.write_line(line)
