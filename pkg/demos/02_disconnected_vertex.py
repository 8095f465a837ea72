"""Why plain Newton breaks down when the solution is block diagonal, and the vertex fix.

For ``Xhat = [[2, -1], [-1, 2]]`` the projection is the identity.  Its
bipartite graph has two components, and at many dual solutions the maximal
pattern is disconnected too, which makes the Jacobian singular.
"""

import numpy as np

from dsproj import DualPoint, ProblemInstance, modified_newton, plain_newton
from dsproj.core import dual_to_Y, sign_split
from dsproj.equivalence import find_vertex, in_same_class, shift_range
from dsproj.errors import JacobianSingular
from dsproj.graph import components
from dsproj.jacobian import assemble, pd_check
from dsproj.solver import singularity_diagnostic

inst = ProblemInstance([[2.0, -1.0], [-1.0, 2.0]])

y0 = DualPoint([1e-3, -2e-3], [5e-4])
try:
    rep = plain_newton(inst, y0)
    print("plain Newton:", rep.converged, rep.iterations)
except JacobianSingular as exc:
    print("plain Newton failed:", exc)

rep = modified_newton(inst, y0)
print("modified Newton:", rep.converged, "iterations", rep.iterations, "shifts", rep.shifts_per_iter)
print(rep.X_star)

# an interior dual solution: every zero of X* is strictly negative in Y
y_star = DualPoint([-1.0, -1.0], [0.0])
print("Y at interior solution:\n", dual_to_Y(inst, y_star))
print(singularity_diagnostic(inst, y_star))

# the vertex finder on a small example
inst = ProblemInstance([[1.0, -3.0], [-2.0, 1.0]])
y = inst.zero_dual()
M = sign_split(dual_to_Y(inst, y)).M
print("pattern at y = 0:\n", M, "\ncomponents:", components(M).K, "pd:", pd_check(M))
print("admissible shift of block 1:", shift_range(dual_to_Y(inst, y), [0], [0]))
for seed in (0, 1, 2, 3):
    y_v, s = find_vertex(inst, y, seed)
    Yv = dual_to_Y(inst, y_v)
    Mv = sign_split(Yv).M
    print(f"seed {seed}: {s} shift, same class {in_same_class(inst, y, y_v)}, Y =", Yv.ravel(),
          "pd:", pd_check(Mv), "min eig V:", np.linalg.eigvalsh(assemble(Mv).dense()).min().round(3))
