"""Newton against ADMM and Dykstra on the same instances."""

import time

import numpy as np

from dsproj import SolveConfig, solve
from dsproj.baselines import active_set_enumerate, dykstra_project
from dsproj.generators import gen_normal

# tiny instances: exact enumeration of support patterns
worst = 0.0
for seed in range(30):
    inst = gen_normal(3, seed)
    worst = max(worst, np.abs(solve(inst).X_star - active_set_enumerate(inst)).max())
print(f"n=3, 30 instances: max |X_newton - X_enum| = {worst:.1e}")

print(f"{'n':>5} {'algorithm':>16} {'iter':>7} {'opt.cond.':>10} {'time ms':>9} {'max|dX|':>9}")
for n in (10, 50, 100):
    inst = gen_normal(n, 1)
    ref = solve(inst)
    for alg in ("modified_newton", "admm", "dykstra"):
        rep = ref if alg == "modified_newton" else solve(inst, SolveConfig(algorithm=alg, tol=1e-10 if alg == "admm" else None))
        print(f"{n:5d} {alg:>16} {rep.iterations:7d} {rep.kkt.total:10.1e} {rep.time_ms:9.1f} "
              f"{np.abs(rep.X_star - ref.X_star).max():9.1e}")

# Dykstra as a standalone high-accuracy oracle
inst = gen_normal(8, 4)
t = time.perf_counter()
X = dykstra_project(inst, tol=1e-14)
print(f"Dykstra n=8 oracle: {1e3 * (time.perf_counter() - t):.1f} ms, gap {np.abs(X - solve(inst).X_star).max():.1e}")
