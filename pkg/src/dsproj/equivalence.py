"""Equivalence classes of dual points and the vertex finder.

Two dual points are equivalent when they produce the same projected matrix
``(xhat + A^T y)_+``.  Each class is a polyhedron.  Its vertices are the
points whose maximal pattern is connected, and there the maximal Jacobian
element is nonsingular.

A shift moves a union of components of the maximal pattern against the
rest: the column multipliers of the selected columns drop by ``t`` and the row
multipliers of the selected rows rise by ``t``.  Diagonal blocks are unchanged,
``Y[R, ~C]`` gains ``t`` and ``Y[~R, C]`` loses ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DualPoint, ProblemInstance, default_tol_pattern, dual_to_Y
from .errors import InvalidSelection, NoFiniteShift
from .graph import BlockPartition, components

__all__ = [
    "ShiftDirection",
    "in_same_class",
    "shift_range",
    "shift_basis",
    "find_vertex",
]


def _as_mask(sel, n: int) -> np.ndarray:
    sel = np.asarray(sel)
    if sel.dtype == bool:
        if sel.size != n:
            raise ValueError(f"boolean selection of length {sel.size}, expected {n}")
        return sel.copy()
    mask = np.zeros(n, dtype=bool)
    mask[sel.astype(np.intp)] = True
    return mask


@dataclass(frozen=True)
class ShiftDirection:
    """Selected rows ``R_sel`` (never row n) and columns ``C_sel`` as boolean masks."""

    R_sel: np.ndarray
    C_sel: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R_sel, dtype=bool)
        C = np.asarray(self.C_sel, dtype=bool)
        if R.size != C.size:
            raise ValueError("row and column masks must have equal length")
        if R[-1]:
            raise InvalidSelection("row n carries no multiplier and cannot be shifted")
        object.__setattr__(self, "R_sel", R)
        object.__setattr__(self, "C_sel", C)

    @classmethod
    def from_indices(cls, n: int, rows, cols) -> "ShiftDirection":
        return cls(_as_mask(rows, n), _as_mask(cols, n))

    @property
    def n(self) -> int:
        return self.R_sel.size

    @property
    def flat(self) -> np.ndarray:
        n = self.n
        w = np.zeros(2 * n - 1)
        w[:n][self.C_sel] = -1.0
        w[n:][self.R_sel[:-1]] = 1.0
        return w

    def apply(self, y: DualPoint, t: float) -> DualPoint:
        c = y.c.copy()
        r = y.r.copy()
        c[self.C_sel] -= t
        r[self.R_sel[:-1]] += t
        return DualPoint(c, r)


def in_same_class(inst: ProblemInstance, y: DualPoint, y2: DualPoint, tol: float | None = None) -> bool:
    """Whether ``y`` and ``y2`` give the same projected matrix up to ``tol`` (max-norm)."""
    if tol is None:
        tol = 1e-10 * (1.0 + float(np.max(np.abs(inst.Xhat))))
    X1 = np.maximum(dual_to_Y(inst, y), 0.0)
    X2 = np.maximum(dual_to_Y(inst, y2), 0.0)
    return bool(np.max(np.abs(X1 - X2)) <= tol)


def shift_range(Y, R_sel, C_sel, tol_pattern: float | None = None) -> tuple[float, float]:
    """Interval of ``t`` for which the shift keeps the off-diagonal blocks nonpositive.

    ``t_lo = max Y[~R, C]`` and ``t_hi = -max Y[R, ~C]``, with infinite
    endpoints for empty blocks.
    """
    Y = np.asarray(Y, dtype=float)
    n = Y.shape[0]
    R = _as_mask(R_sel, n)
    C = _as_mask(C_sel, n)
    if R[-1]:
        raise InvalidSelection("row n carries no multiplier and cannot be shifted")
    if tol_pattern is None:
        tol_pattern = default_tol_pattern(Y)
    low_block = Y[~R][:, C]
    high_block = Y[R][:, ~C]
    t_lo = float(low_block.max()) if low_block.size else -np.inf
    hb = float(high_block.max()) if high_block.size else -np.inf
    if t_lo > tol_pattern or hb > tol_pattern:
        raise InvalidSelection(
            f"off-diagonal block has a positive entry ({max(t_lo, hb):.3e}); selection is not closed"
        )
    return t_lo, -hb


def shift_basis(partition: BlockPartition) -> np.ndarray:
    """Matrix ``U`` with one shift direction per block (the last column only moves c)."""
    n = partition.n
    U = np.zeros((2 * n - 1, partition.K))
    for k, (rows, cols) in enumerate(zip(partition.row_groups, partition.col_groups)):
        U[cols, k] = -1.0
        rows = rows[rows < n - 1]
        U[n + rows, k] = 1.0
    return U


class _LabelUnion:
    """Union-find over component labels."""

    def __init__(self, k: int):
        self.parent = np.arange(k)

    def find(self, a: int) -> int:
        p = self.parent
        root = a
        while p[root] != root:
            root = p[root]
        while p[a] != root:
            p[a], a = root, p[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def find_vertex(
    inst: ProblemInstance,
    y: DualPoint,
    rng_seed=0,
    *,
    selection: str = "subset",
    trace: list | None = None,
) -> tuple[DualPoint, int]:
    """Move ``y`` inside its class to a point whose maximal pattern is connected.

    Each shift selects components of the maximal pattern that do not contain
    row n and moves them to an endpoint of their admissible range, which
    zeroes an entry joining them to another component.  ``selection`` is
    ``"single"`` (one random component per shift) or ``"subset"`` (a random
    nonempty union, the default).  When both endpoints are finite one is drawn at random.

    ``rng_seed`` may be an int or a ``numpy.random.Generator``.  If ``trace``
    is a list, the component count before the first shift and after every
    shift is appended to it.

    Returns the vertex and the number of shifts taken.
    """
    if selection not in ("single", "subset"):
        raise ValueError(f"unknown selection rule {selection!r}")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    n = inst.n
    c = y.c.copy()
    r = y.row_multipliers().copy()
    shifts = 0
    first = True

    while True:
        Y = inst.Xhat + r[:, None] + c[None, :]
        tol = default_tol_pattern(Y)
        part = components(Y >= -tol)
        if trace is not None and (first or part.K != trace[-1]):
            trace.append(part.K)
        first = False
        if part.K == 1:
            break

        rl = part.row_labels.copy()
        cl = part.col_labels.copy()
        K = part.K
        while K > 1:
            last = rl[n - 1]
            if selection == "single":
                pick = rng.integers(K - 1)
                chosen = np.array([pick if pick < last else pick + 1])
            else:
                others = np.setdiff1d(np.arange(K), [last])
                take = np.zeros(others.size, dtype=bool)
                while not take.any():
                    take = rng.random(others.size) < 0.5
                chosen = others[take]
            Rm = np.isin(rl, chosen)
            Cm = np.isin(cl, chosen)

            t_lo, t_hi = shift_range(Y, Rm, Cm, tol_pattern=tol)
            lo_ok, hi_ok = np.isfinite(t_lo), np.isfinite(t_hi)
            if not (lo_ok or hi_ok):
                raise NoFiniteShift("both ends of the shift range are infinite")
            if lo_ok and hi_ok:
                t = t_hi if rng.random() < 0.5 else t_lo
            else:
                t = t_hi if hi_ok else t_lo

            c[Cm] -= t
            r[Rm] += t
            rows_R, rows_nR = np.nonzero(Rm)[0], np.nonzero(~Rm)[0]
            cols_C, cols_nC = np.nonzero(Cm)[0], np.nonzero(~Cm)[0]
            if rows_R.size and cols_nC.size:
                Y[np.ix_(rows_R, cols_nC)] += t
            if rows_nR.size and cols_C.size:
                Y[np.ix_(rows_nR, cols_C)] -= t
            shifts += 1

            if t >= 0:
                bi, bj = rows_R, cols_nC
            else:
                bi, bj = rows_nR, cols_C
            sub = Y[np.ix_(bi, bj)]
            ei, ej = np.nonzero(sub >= -tol)
            pairs = np.unique(np.stack([rl[bi[ei]], cl[bj[ej]]], axis=1), axis=0)
            uf = _LabelUnion(K)
            for a, b in pairs:
                uf.union(int(a), int(b))
            roots = np.array([uf.find(k) for k in range(K)])
            _, relabel = np.unique(roots, return_inverse=True)
            K_new = int(relabel.max()) + 1
            if K_new >= K:
                raise RuntimeError("vertex shift failed to join two components")
            rl, cl, K = relabel[rl], relabel[cl], K_new
            if trace is not None:
                trace.append(K)
        # recompute Y from the multipliers and certify connectivity at the top of the loop

    return DualPoint(c, r[:-1]), shifts
