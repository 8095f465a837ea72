"""Reference solvers used as independent oracles.

* :func:`admm_solve`: two-block ADMM on ``min 1/2||x - xhat||^2, x = v, Av = b, x >= 0``.
* :func:`dykstra_project`: Dykstra's alternating projections between the
  affine set ``{Ax = b}`` and the nonnegative orthant.
* :func:`active_set_enumerate`: exhaustive search over support patterns for
  ``n <= 4``.
"""

from __future__ import annotations

import time
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .core import DualPoint, KktResiduals, ProblemInstance, constraint_matrix
from .errors import InstanceTooLarge, MaxIterExceeded

__all__ = [
    "AffineProjector",
    "affine_project",
    "kkt_residuals",
    "admm_solve",
    "dykstra_project",
    "dykstra_solve",
    "active_set_enumerate",
]


def _apply_A(X: np.ndarray) -> np.ndarray:
    return np.concatenate([X.sum(axis=0), X[:-1].sum(axis=1)])


def _apply_AT(w: np.ndarray, n: int) -> np.ndarray:
    r = np.append(w[n:], 0.0)
    return r[:, None] + w[None, :n]


class AffineProjector:
    """Projection onto ``{x : Ax = b}`` with ``AA^T`` factored once.

    ``AA^T = [[n I_n, J^T], [J, n I_{n-1}]]`` with ``J`` the all-ones
    ``(n-1) x n`` block.
    """

    def __init__(self, n: int):
        self.n = n
        G = np.zeros((2 * n - 1, 2 * n - 1))
        G[:n, :n] = n * np.eye(n)
        G[n:, n:] = n * np.eye(n - 1)
        G[n:, :n] = 1.0
        G[:n, n:] = 1.0
        self._cho = sla.cho_factor(G, lower=True)

    def gram_solve(self, rhs) -> np.ndarray:
        return sla.cho_solve(self._cho, rhs)

    def multiplier(self, X) -> np.ndarray:
        """``w`` with ``A^T w`` the correction that maps ``X`` onto the affine set."""
        return self.gram_solve(_apply_A(X) - 1.0)

    def project_matrix(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return X - _apply_AT(self.multiplier(X), self.n)

    def __call__(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        X = v.reshape((self.n, self.n), order="F")
        return self.project_matrix(X).reshape(-1, order="F")


@lru_cache(maxsize=16)
def _projector(n: int) -> AffineProjector:
    return AffineProjector(n)


def affine_project(P: AffineProjector, v) -> np.ndarray:
    """Closest point to the vector ``v`` (length n^2) in ``{Ax = b}``."""
    return P(v)


def kkt_residuals(inst: ProblemInstance, X, y: DualPoint) -> KktResiduals:
    """KKT residuals for a primal matrix and dual estimate from a splitting method.

    ``z`` is taken as the nonnegative part of ``x - xhat - A^T y``, so the
    dual residual measures the negative part that remains.
    """
    X = np.asarray(X, dtype=float)
    G = X - inst.Xhat - (y.row_multipliers()[:, None] + y.c[None, :])
    Z = np.maximum(G, 0.0)
    primal = float(np.linalg.norm(_apply_A(X) - 1.0))
    dual = float(np.linalg.norm(G - Z))
    comp = float(abs(np.sum(Z * X)))
    return KktResiduals(primal=primal, dual=dual, complementarity=comp)


def _report(algorithm, inst, X, y, history, converged, start, seed, iterations):
    from .solver import SolveReport

    return SolveReport(
        algorithm=algorithm,
        converged=converged,
        iterations=iterations,
        residual_history=history,
        shifts_per_iter=[],
        kkt=kkt_residuals(inst, X, y),
        X_star=X,
        y_star=y,
        wall_time=time.perf_counter() - start,
        seed=seed,
    )


def admm_solve(inst: ProblemInstance, cfg=None):
    """ADMM with scaled dual and residual balancing of the penalty.

    Stops when the KKT total (with the multiplier recovered from the scaled
    dual) drops to ``cfg.tol``.  ``residual_history`` holds that total per
    iteration.
    """
    from .solver import SolveConfig

    cfg = cfg or SolveConfig(algorithm="admm")
    if cfg.algorithm != "admm":
        cfg = SolveConfig(tol=cfg.tol, max_iter=cfg.max_iter, seed=cfg.seed, algorithm="admm")
    n = inst.n
    tol = cfg.tol_for(n)
    max_iter = cfg.max_iter_for()
    P = _projector(n)
    Xh = inst.Xhat
    start = time.perf_counter()

    rho = 1.0
    x = np.maximum(Xh, 0.0)
    v = P.project_matrix(x)
    u = np.zeros_like(x)

    def dual_estimate(u, rho):
        w = -rho * P.gram_solve(_apply_A(u))
        return DualPoint(w[:n], w[n:])

    y = dual_estimate(u, rho)
    total = kkt_residuals(inst, x, y).total
    history = [total]
    k = 0
    while total > tol and k < max_iter:
        k += 1
        x = np.maximum((Xh + rho * (v - u)) / (1.0 + rho), 0.0)
        v_old = v
        v = P.project_matrix(x + u)
        u = u + x - v
        y = dual_estimate(u, rho)
        total = kkt_residuals(inst, x, y).total
        history.append(total)
        if k % 10 == 0:
            r_pri = np.linalg.norm(x - v)
            r_dual = rho * np.linalg.norm(v - v_old)
            if r_pri > 10.0 * r_dual and rho < 1e4:
                rho *= 2.0
                u /= 2.0
            elif r_dual > 10.0 * r_pri and rho > 1e-4:
                rho /= 2.0
                u *= 2.0
    return _report("admm", inst, x, y, history, total <= tol, start, cfg.seed, k)


def _dykstra(inst, tol, max_iter):
    n = inst.n
    P = _projector(n)
    x = inst.Xhat.copy()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for k in range(1, max_iter + 1):
        a = P.project_matrix(x + p)
        p = x + p - a
        x_new = np.maximum(a + q, 0.0)
        q = a + q - x_new
        change = np.max(np.abs(x_new - x))
        x = x_new
        if change <= tol and np.max(np.abs(a - x)) <= tol:
            w = -P.gram_solve(_apply_A(p))
            return x, DualPoint(w[:n], w[n:]), k
    raise MaxIterExceeded(f"Dykstra did not reach {tol:.1e} in {max_iter} iterations")


def dykstra_project(inst: ProblemInstance, tol: float = 1e-13, max_iter: int = 200_000) -> np.ndarray:
    """Projection by Dykstra's method; stops when successive iterates and the
    two projections agree to ``tol`` in max-norm."""
    return _dykstra(inst, tol, max_iter)[0]


def dykstra_solve(inst: ProblemInstance, cfg=None):
    """:func:`dykstra_project` wrapped in a :class:`~dsproj.solver.SolveReport`."""
    from .solver import SolveConfig

    cfg = cfg or SolveConfig(algorithm="dykstra")
    start = time.perf_counter()
    tol = 1e-13 if cfg.tol is None else cfg.tol
    max_iter = cfg.max_iter if cfg.max_iter is not None else 200_000
    try:
        X, y, k = _dykstra(inst, tol, max_iter)
        converged = True
    except MaxIterExceeded:
        X, y, k, converged = np.maximum(inst.Xhat, 0.0), inst.zero_dual(), max_iter, False
    rep = _report("dykstra", inst, X, y, [], converged, start, cfg.seed, k)
    rep.residual_history = [rep.kkt.total]
    return rep


def active_set_enumerate(inst: ProblemInstance) -> np.ndarray:
    """Exact projection by enumerating support patterns (``n <= 4``).

    For every pattern ``S`` whose Jacobian block ``A_S A_S^T`` is nonsingular,
    solve the equality-constrained least-squares problem on ``S``:
    ``y = (A_S A_S^T)^{-1} (b - A_S xhat_S)`` and ``x_S = xhat_S + A_S^T y``.
    A pattern is accepted when ``x_S >= 0`` and ``(xhat + A^T y) <= 0`` off
    ``S``; then ``x`` is the optimum.  Some vertex of the optimal dual set
    has a connected (hence nonsingular) pattern, so an accepted pattern
    always exists.
    """
    n = inst.n
    if n > 4:
        raise InstanceTooLarge(f"enumeration limited to n <= 4, got n = {n}")
    m = n * n
    A = constraint_matrix(n).toarray()
    xh = inst.xhat
    b = np.ones(2 * n - 1)

    codes = np.arange(1, 2 ** m, dtype=np.int64)
    S = ((codes[:, None] >> np.arange(m)) & 1).astype(float)
    rowcol = S.reshape(-1, n, n, order="F")
    keep = rowcol.any(axis=1).all(axis=1) & rowcol.any(axis=2).all(axis=1)
    S = S[keep]

    V = np.einsum("ik,pk,jk->pij", A, S, A)
    det = np.linalg.det(V)
    S, V = S[np.abs(det) > 0.5], V[np.abs(det) > 0.5]

    rhs = b[None, :] - (S * xh[None, :]) @ A.T
    y = np.linalg.solve(V, rhs[..., None])[..., 0]
    full = xh[None, :] + y @ A
    eps = 1e-12 * (1.0 + np.max(np.abs(xh)))
    on = np.where(S > 0, full, np.inf).min(axis=1) >= -eps
    off = np.where(S > 0, -np.inf, full).max(axis=1) <= eps
    ok = np.nonzero(on & off)[0]
    if ok.size == 0:
        raise RuntimeError("no support pattern satisfies the optimality conditions")
    xs = np.maximum(full[ok], 0.0)
    spread = np.max(np.abs(xs - xs[0]))
    if spread > 1e-9 * (1.0 + np.max(np.abs(xh))):
        raise RuntimeError(f"accepted patterns disagree by {spread:.3e}")
    return xs[0].reshape((n, n), order="F")
