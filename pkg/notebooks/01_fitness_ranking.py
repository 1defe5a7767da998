# %% [markdown]
# Fitness and complexity on a toy export matrix
#
# Countries that export many products, and in particular products that few
# weak exporters make, end up with high fitness.

# %%
import numpy as np

from complexitytrap.fitness import iterate_fitness, iterates
from complexitytrap.panel import CountryProductMatrix
from complexitytrap.rca import diversification, order_matrix, rca_from_values, ubiquity

# %% the smallest interesting case: A exports both products, B only the second
for n, step in iterates(np.array([[1, 1], [0, 1]])):
    print(n, step.fitness.round(4), step.complexity.round(4))
    if n == 3:
        break

# %% RCA on a small random value table, then the binary matrix
rng = np.random.default_rng(1)
values = rng.lognormal(size=(6, 8)) * (rng.random((6, 8)) < 0.6)
values[:, values.sum(axis=0) == 0] = 1.0
rca = rca_from_values(values)
m = CountryProductMatrix(2000, [f"C{i}" for i in range(6)], [f"P{j}" for j in range(8)],
                         (rca >= 1).astype(int))
print(m.m)
print("diversification", diversification(m))
print("ubiquity", ubiquity(m))

# %% iterate to convergence and order the matrix by the result
fit = iterate_fitness(m)
print("converged", fit.converged, "after", fit.iterations, "iterations")
for c, f in sorted(fit.fitness_map().items(), key=lambda kv: -kv[1]):
    print(f"{c}  F = {f:.4f}")
print(order_matrix(m, fit).m)  # rows by fitness, columns by complexity
