"""Monotone fixed-point solving, the steepest-path oracle and nonuniqueness."""

# %% Imports
import numpy as np

from inflap import DirichletProblem, solve, solve_exact_amle, uniqueness_probe
from inflap.gallery import sign_change_example
from inflap.graph import random_connected_graph

# %% f = 0: the iteration agrees with the exact steepest-path construction
rng = np.random.default_rng(4)
G = random_connected_graph(40, 30, rng)
p = DirichletProblem.build(G, G.ids[5:], 0.0, rng.uniform(-1, 1, G.n))
out = solve(p)
print(f"{out.iterations} sweeps from the {out.init} start, residual {out.residual:.1e}")
print("max |iteration - exact| =", np.max(np.abs(out.u - solve_exact_amle(p))))

# %% Gauss-Seidel reaches the same fixed point
print("schemes agree:", np.allclose(solve(p, scheme="gauss_seidel").u, out.u, atol=1e-9))

# %% One source sign: the two monotone starts meet
rep = uniqueness_probe(p.with_data(f=np.full(G.n, 0.01)))
print(rep.kind, "gap", rep.gap)

# %% Sign-changing source: a whole family of solutions u + a on the interior
ex = sign_change_example()
rep = uniqueness_probe(ex.problem)
print(rep.kind, "gap", rep.gap)
print("largest solution:", np.round(rep.u_hi, 6))
print("smallest solution:", np.round(rep.u_lo, 6))
