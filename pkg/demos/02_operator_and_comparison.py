"""The discrete infinity Laplacian, sub/supersolutions and comparison."""

# %% Imports
import numpy as np

from inflap import (DirichletProblem, comparison_check, inf_laplacian, is_subsolution,
                    is_supersolution, laplacian_field, residual, solve)
from inflap.graph import path_graph

# %% The operator is sup + inf - 2u over neighbors
P = path_graph(5)
u = np.array([0.0, 1.0, 4.0, 9.0, 16.0])
print("Δ∞ of k^2 on a path:", laplacian_field(P, u))
print("at vertex 2 only:", inf_laplacian(P, u, 2))

# %% A problem with a positive source and its solution
p = DirichletProblem.build(P, [1, 2, 3], 0.5, {0: 0.0, 4: 1.0})
sol = solve(p).u
print("solution:", np.round(sol, 6), "residual:", residual(p, sol).sup_norm)

# %% Comparison: a subsolution stays below a supersolution when f >= 0
sub = sol - 0.2 * np.array([0, 1, 1, 1, 0])
sup_ = np.maximum(sol, sol + 0.3)
sup_[[0, 4]] = sol[[0, 4]] + 0.1
print("sub is a subsolution:", is_subsolution(p, sub))
print("sup is a supersolution:", is_supersolution(p, sup_))
rep = comparison_check(p, sub, sup_)
print("comparison verdict:", rep.verdict, "| interior gap", rep.sup_diff_interior,
      "<= boundary gap", rep.sup_diff_boundary)
