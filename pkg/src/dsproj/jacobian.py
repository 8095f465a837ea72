"""Generalized Jacobian elements ``V(M) = A Diag(vec M) A^T``.

For a 0-1 pattern ``M`` with first ``n - 1`` rows ``Mhat`` the element has the
block form::

    V = [[Diag(M^T e),  Mhat^T       ],
         [Mhat,         Diag(Mhat e) ]]

of order ``2n - 1``.  It is positive semidefinite, and nonsingular exactly
when the bipartite graph of ``M`` is connected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import JacobianSingular

__all__ = ["JacobianElement", "JacobianFactor", "assemble", "factor", "solve", "pd_check"]

PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class JacobianElement:
    d_c: np.ndarray
    d_r: np.ndarray
    Mhat: np.ndarray

    @property
    def n(self) -> int:
        return self.d_c.size

    @property
    def order(self) -> int:
        return 2 * self.n - 1

    def trace(self) -> float:
        return float(self.d_c.sum() + self.d_r.sum())

    def dense(self) -> np.ndarray:
        n = self.n
        V = np.zeros((2 * n - 1, 2 * n - 1))
        V[:n, :n] = np.diag(self.d_c)
        V[n:, n:] = np.diag(self.d_r)
        V[n:, :n] = self.Mhat
        V[:n, n:] = self.Mhat.T
        return V

    def matvec(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        n = self.n
        u, v = w[:n], w[n:]
        return np.concatenate([self.d_c * u + self.Mhat.T @ v, self.Mhat @ u + self.d_r * v])


def assemble(M) -> JacobianElement:
    """Structured Jacobian element for the 0-1 pattern ``M``."""
    M = np.asarray(M)
    Mhat = np.ascontiguousarray(M[:-1], dtype=float)
    d_c = M.sum(axis=0).astype(float)
    d_r = Mhat.sum(axis=1)
    return JacobianElement(d_c=d_c, d_r=d_r, Mhat=Mhat)


class JacobianFactor:
    """A factorization of one :class:`JacobianElement`, reusable for several right-hand sides."""

    def __init__(self, V: JacobianElement):
        self.V = V
        n = V.n
        self.threshold = PIVOT_RTOL * V.trace() / V.order
        self._schur = None
        self._pivoted = None
        if np.all(V.d_c > self.threshold):
            self._factor_schur()
        else:
            self._factor_dense()

    def _factor_schur(self):
        V = self.V
        self._inv_dc = 1.0 / V.d_c
        if V.n == 1:
            self._schur = (np.zeros((0, 0)), True)
            return
        W = V.Mhat * self._inv_dc[None, :]
        S = np.diag(V.d_r) - W @ V.Mhat.T
        try:
            cf = sla.cho_factor(S, lower=True, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise JacobianSingular("Schur complement is not positive definite") from exc
        piv = np.diag(cf[0]) ** 2
        if piv.min() <= self.threshold:
            raise JacobianSingular(
                f"Schur complement pivot {piv.min():.3e} below threshold {self.threshold:.3e}"
            )
        self._schur = cf

    def _factor_dense(self):
        V = self.V.dense()
        c, piv, rank, info = lapack.dpstrf(V, lower=1, tol=self.threshold)
        if info < 0:
            raise RuntimeError(f"dpstrf failed with info={info}")
        if rank < V.shape[0]:
            raise JacobianSingular(f"Jacobian has numerical rank {rank} < {V.shape[0]}")
        L = np.tril(c)
        self._pivoted = (L, piv - 1)

    def solve(self, rhs) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        n = self.V.n
        if self._schur is not None:
            rc, rr = rhs[:n], rhs[n:]
            t = self._inv_dc * rc
            if n == 1:
                return t.copy()
            dr = sla.cho_solve(self._schur, rr - self.V.Mhat @ t, check_finite=False)
            dc = self._inv_dc * (rc - self.V.Mhat.T @ dr)
            return np.concatenate([dc, dr])
        L, p = self._pivoted
        b = rhs[p]
        z = sla.solve_triangular(L, b, lower=True, check_finite=False)
        w = sla.solve_triangular(L.T, z, lower=False, check_finite=False)
        out = np.empty_like(w)
        out[p] = w
        return out


def factor(V: JacobianElement) -> JacobianFactor:
    return JacobianFactor(V)


def solve(V: JacobianElement, rhs) -> np.ndarray:
    """Solve ``V d = rhs``; raises :class:`JacobianSingular` on a tiny pivot."""
    return JacobianFactor(V).solve(rhs)


def pd_check(M) -> bool:
    """Whether the maximal Jacobian element of ``M`` factors as positive definite."""
    try:
        JacobianFactor(assemble(M))
    except JacobianSingular:
        return False
    return True
