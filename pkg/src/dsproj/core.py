"""Problem data, dual parametrization and the residual map.

The nearest doubly stochastic matrix problem is

    min ||X - Xhat||_F^2   s.t.  X e = e,  X^T e = e,  X >= 0.

With ``x = vec(X)`` (column stacking) the equality constraints read
``A x = b`` where ``A`` has ``2n - 1`` rows: the ``n`` column sums followed by
the first ``n - 1`` row sums (the last row sum is redundant and dropped), and
``b`` is the all-ones vector.  A dual vector ``y = (c, r)`` defines

    Y = Mat(xhat + A^T y),   Y[i, j] = Xhat[i, j] + r[i] + c[j]   (r[n-1] := 0),

and the problem reduces to the piecewise-linear system
``F(y) = A (xhat + A^T y)_+ - b = 0``.

Nothing here ever materializes ``A``; :func:`constraint_matrix` builds it
explicitly only so that tests can check the structured formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError

__all__ = [
    "ProblemInstance",
    "DualPoint",
    "SignSplit",
    "KktResiduals",
    "vectorize",
    "matricize",
    "constraint_matrix",
    "dual_to_Y",
    "default_tol_pattern",
    "sign_split",
    "support_pattern",
    "residual",
    "kkt_report",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def vectorize(X) -> np.ndarray:
    """Column-major stacking of a square matrix, ``vec(X)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {X.shape}")
    return X.reshape(-1, order="F").copy()


def matricize(x) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {x.shape}")
    n = int(round(np.sqrt(x.size)))
    if n * n != x.size:
        raise DimensionError(f"length {x.size} is not a perfect square")
    return x.reshape((n, n), order="F").copy()


@dataclass(frozen=True)
class ProblemInstance:
    """The data matrix ``Xhat`` of one projection problem."""

    Xhat: np.ndarray

    def __post_init__(self):
        X = np.array(self.Xhat, dtype=float)
        if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] < 1:
            raise DimensionError(f"Xhat must be a non-empty square matrix, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            bad = np.argwhere(~np.isfinite(X))[0]
            raise ValueError(f"Xhat contains a non-finite entry at {tuple(int(k) for k in bad)}")
        object.__setattr__(self, "Xhat", _frozen(X))

    @property
    def n(self) -> int:
        return self.Xhat.shape[0]

    @property
    def xhat(self) -> np.ndarray:
        return vectorize(self.Xhat)

    def zero_dual(self) -> "DualPoint":
        return DualPoint.zeros(self.n)


@dataclass(frozen=True)
class DualPoint:
    """Dual vector ``y = (c, r)``; ``c`` has length n, ``r`` length n - 1."""

    c: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=float).reshape(-1)
        r = np.array(self.r, dtype=float).reshape(-1)
        if r.size != c.size - 1:
            raise DimensionError(f"need len(r) == len(c) - 1, got {c.size} and {r.size}")
        object.__setattr__(self, "c", _frozen(c))
        object.__setattr__(self, "r", _frozen(r))

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([self.c, self.r])

    @classmethod
    def from_flat(cls, y) -> "DualPoint":
        y = np.asarray(y, dtype=float).reshape(-1)
        if y.size % 2 != 1:
            raise DimensionError(f"flat dual vector must have odd length 2n-1, got {y.size}")
        n = (y.size + 1) // 2
        return cls(y[:n], y[n:])

    @classmethod
    def zeros(cls, n: int) -> "DualPoint":
        return cls(np.zeros(n), np.zeros(n - 1))

    def row_multipliers(self) -> np.ndarray:
        """Row multipliers padded with the implicit zero for row n."""
        return np.append(self.r, 0.0)


@dataclass(frozen=True)
class SignSplit:
    """``Y = X - Z`` with ``X, Z >= 0``, ``X * Z = 0`` and the maximal pattern."""

    Y: np.ndarray
    X: np.ndarray
    Z: np.ndarray
    M: np.ndarray
    tol_pattern: float


@dataclass(frozen=True)
class KktResiduals:
    primal: float
    dual: float
    complementarity: float

    @property
    def total(self) -> float:
        return self.primal + self.dual + self.complementarity

    def as_dict(self) -> dict:
        return {
            "primal": self.primal,
            "dual": self.dual,
            "complementarity": self.complementarity,
            "total": self.total,
        }


def _check_sizes(inst: ProblemInstance, y: DualPoint):
    if y.n != inst.n:
        raise DimensionError(f"dual point of order {y.n} does not match instance of order {inst.n}")


def constraint_matrix(n: int) -> sp.csr_matrix:
    """Explicit sparse ``A`` (first 2n-1 rows of ``[I kron e^T; e^T kron I]``)."""
    e = np.ones((1, n))
    full = sp.vstack([sp.kron(sp.identity(n), e), sp.kron(e, sp.identity(n))])
    return sp.csr_matrix(full)[: 2 * n - 1]


def dual_to_Y(inst: ProblemInstance, y: DualPoint) -> np.ndarray:
    """Pre-projection matrix ``Mat(xhat + A^T y)``."""
    _check_sizes(inst, y)
    return inst.Xhat + y.row_multipliers()[:, None] + y.c[None, :]


def default_tol_pattern(Y: np.ndarray) -> float:
    return 1e-11 * (1.0 + float(np.max(np.abs(Y)))) if Y.size else 0.0


def sign_split(Y, tol_pattern: float | None = None) -> SignSplit:
    """Split ``Y`` into positive and negative parts and the maximal pattern.

    ``M[i, j] = 1`` exactly where ``Y[i, j] >= -tol_pattern``.  ``None`` selects
    :func:`default_tol_pattern`.
    """
    Y = np.asarray(Y, dtype=float)
    if tol_pattern is None:
        tol_pattern = default_tol_pattern(Y)
    X = np.maximum(Y, 0.0)
    Z = np.maximum(-Y, 0.0)
    M = (Y >= -tol_pattern).astype(np.int8)
    return SignSplit(Y=Y, X=X, Z=Z, M=M, tol_pattern=float(tol_pattern))


def support_pattern(Y, tol_pattern: float | None = None) -> np.ndarray:
    """Minimal pattern of ``(Y)_+``: entries above the round-off band.

    Shifts land on zeros only up to round-off, so entries of order 1e-16 are
    treated as zero; ``tol_pattern=0`` gives the exact support.
    """
    Y = np.asarray(Y, dtype=float)
    if tol_pattern is None:
        tol_pattern = default_tol_pattern(Y)
    return (Y > tol_pattern).astype(np.int8)


def _constraint_residual(X: np.ndarray) -> np.ndarray:
    return np.concatenate([X.sum(axis=0) - 1.0, X[:-1].sum(axis=1) - 1.0])


def residual(inst: ProblemInstance, y: DualPoint) -> tuple[np.ndarray, float]:
    """``F(y)`` (column sums, then the first n - 1 row sums, minus one) and its 2-norm."""
    X = np.maximum(dual_to_Y(inst, y), 0.0)
    F = _constraint_residual(X)
    return F, float(np.linalg.norm(F))


def kkt_report(inst: ProblemInstance, y: DualPoint) -> KktResiduals:
    """Residuals of the full KKT system at ``x = (xhat + A^T y)_+``.

    Dual feasibility and complementarity hold by construction, so only the
    primal residual ``||Ax - b||`` is expected to be nonzero.
    """
    _check_sizes(inst, y)
    ATy = y.row_multipliers()[:, None] + y.c[None, :]
    split = sign_split(inst.Xhat + ATy, tol_pattern=0.0)
    X, Z = split.X, split.Z
    primal = float(np.linalg.norm(_constraint_residual(X)))
    dual = float(np.linalg.norm(X - inst.Xhat - ATy - Z))
    comp = float(abs(np.sum(X * Z)))
    return KktResiduals(primal=primal, dual=dual, complementarity=comp)
