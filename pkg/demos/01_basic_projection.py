"""Project a random matrix onto the doubly stochastic matrices."""

import numpy as np

from dsproj import ProblemInstance, SolveConfig, nearest_doubly_stochastic, solve
from dsproj.generators import gen_normal

np.set_printoptions(precision=4, suppress=True)

# a small hand-made matrix first
Xhat = np.array([[0.8, 0.3], [0.1, 0.6]])
print(nearest_doubly_stochastic(Xhat))  # [[0.75, 0.25], [0.25, 0.75]]

# a standard normal 100 x 100 instance
inst = gen_normal(100, seed=0)
rep = solve(inst, SolveConfig(seed=0))
print(f"converged={rep.converged} iterations={rep.iterations} opt.cond.={rep.kkt.total:.1e} time={rep.time_ms:.1f} ms")

# the residual drops quadratically once it is small
for k, r in enumerate(rep.residual_history):
    print(f"  k={k:2d}  ||F|| = {r:.3e}")

X = rep.X_star
print("row sums in", X.sum(axis=1).min(), X.sum(axis=1).max())
print("col sums in", X.sum(axis=0).min(), X.sum(axis=0).max())
print("fraction of zero entries:", np.mean(X == 0))

# the dual point gives the solution as (Xhat + r_i + c_j)_+
y = rep.y_star
Y = inst.Xhat + y.row_multipliers()[:, None] + y.c[None, :]
print("max |X - (Y)_+| =", np.abs(X - np.maximum(Y, 0)).max())
