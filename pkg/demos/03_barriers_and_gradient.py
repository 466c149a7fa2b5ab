"""Quadratic barriers and the interior gradient estimate."""

# %% Imports
import numpy as np

from inflap import (DirichletProblem, barrier_envelope, barrier_field, barrier_guarantees,
                    gradient_estimate_sweep, solve)
from inflap.graph import grid_graph

# %% A grid problem with sign-changing source
rng = np.random.default_rng(0)
G = grid_graph(9, 9)
X = [v for v in G.ids if 0 < v % 9 < 8 and 0 < v // 9 < 8]
f = rng.uniform(-0.05, 0.05, G.n)
p = DirichletProblem.build(G, X, f, rng.uniform(0, 1, G.n))

# %% A barrier anchored at a boundary vertex
c = float(np.max(np.abs(f)))
bar = barrier_field(p, 0, c=c, R=1, side="upper")
print("barrier coefficients: a=%.3f b=%.3f c=%.3f" % (bar.spec.a, bar.spec.b, bar.spec.c))
print("guarantees:", barrier_guarantees(p, bar))

# %% The envelopes bracket the solution
up = barrier_envelope(p, "upper")
lo = barrier_envelope(p, "lower")
u = solve(p).u
print("lower <= u <= upper:", bool(np.all(lo <= u + 1e-12) and np.all(u <= up + 1e-12)))

# %% Every admissible (x, y, N) satisfies the gradient estimate
checked, bad = gradient_estimate_sweep(p, u)
print(f"{checked} gradient checks, {bad} violations")
