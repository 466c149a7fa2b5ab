"""Infinite-graph phenomena seen through finite truncations."""

# %% Imports
import numpy as np
from scipy.special import zeta

from inflap import residual
from inflap.gallery import (cca_counterexample, comb_graph, comb_margins, doubling_graph,
                            nonexistence_witness)
from inflap import cca_ccb_probe, inf_laplacian

# %% Doubling graph: u(n) = n and v = 0 solve the same problem
dg = doubling_graph(2**12)
print("residual of u:", residual(dg.problem, dg.u, complete_only=True).sup_norm)
print("residual of v:", residual(dg.problem, dg.v, complete_only=True).sup_norm)

# %% Comb with teeth of length (n+2)^3: a bounded solution that is not constant
cg = comb_graph(C=2, N_teeth=6)
print("v(0, 0) =", cg.v[cg.vertex(0, 0)], " closed form 8(zeta(3) - 1) =", 8 * (zeta(3) - 1))
print("residual on complete vertices:", residual(cg.problem, cg.v, complete_only=True).sup_norm)
m = comb_margins(2, 10**4)
print("smallest margin up to n = 1e4:", m.min())

# %% A graph where comparison with cones fails
ex = cca_counterexample(0.3)
print("Δ∞u at the center:", inf_laplacian(ex.graph, ex.u, ex.center))
print("cone comparison holds everywhere probed:", cca_ccb_probe(ex.graph, ex.u).passed())

# %% A negative source on ever longer paths: no bounded limit
for row in nonexistence_witness(64):
    print(f"r={row['r']:3d}  sup|u|={row['sup_norm']:8.2f}")
