"""ε-graphs on sampled domains approaching the continuum problem."""

# %% Imports
from inflap.euclid import DomainSpec, FunctionSpec, convergence_run

# %% Interval with affine data: the continuum solution is u(x) = x
line = FunctionSpec("linear", {"gradient": [1.0]})
rep = convergence_run(DomainSpec("box", {"lo": [0.0], "hi": [1.0]}, g=line),
                      [0.2, 0.1, 0.05], exact=line)
for eps, err, n in zip(rep.eps, rep.column("error"), rep.column("n_samples")):
    print(f"eps={eps:.3f}  samples={n:4d}  sup error={err:.4f}")

# %% Annulus with cone data |x|
cone = FunctionSpec("cone", {"a": 0.0, "b": 1.0, "apex": [0.0, 0.0]})
rep = convergence_run(DomainSpec("annulus", {"r_in": 0.25, "r_out": 1.0}, g=cone),
                      [0.5, 0.35, 0.25], h_rule=lambda e: e / 10, exact=cone, max_samples=5000)
for eps, err, cau in zip(rep.eps, rep.column("error"), rep.cauchy):
    print(f"eps={eps:.3f}  sup error={err:.4f}  change from previous level={cau}")
