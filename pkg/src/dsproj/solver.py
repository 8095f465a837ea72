"""Semismooth Newton solvers for ``F(y) = 0``.

:func:`modified_newton` is the two-step method: each iteration first moves the
dual point to a vertex of its equivalence class (where the maximal Jacobian
element is nonsingular) and then takes a full Newton step from there.
:func:`plain_newton` skips the vertex step and fails with
:class:`~dsproj.errors.JacobianSingular` when the maximal pattern of an iterate
is disconnected.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import (
    DualPoint,
    KktResiduals,
    ProblemInstance,
    default_tol_pattern,
    dual_to_Y,
    kkt_report,
    residual,
    sign_split,
    support_pattern,
)
from .equivalence import find_vertex
from .errors import CyclingSuspected, MaxIterExceeded, NonSquareBlock
from .graph import components, is_connected
from .jacobian import assemble, pd_check, solve as jacobian_solve

__all__ = [
    "ALGORITHMS",
    "SolveConfig",
    "SolveReport",
    "plain_newton",
    "modified_newton",
    "solve",
    "Subproblem",
    "split_subproblems",
    "assemble_split_solution",
    "solve_split",
    "SingularityDiagnostic",
    "singularity_diagnostic",
]

ALGORITHMS = ("modified_newton", "plain_newton", "admm", "dykstra")

_DEFAULT_MAX_ITER = {"modified_newton": 100, "plain_newton": 100, "admm": 50_000, "dykstra": 200_000}


def default_tol(n: int) -> float:
    return 1e-11 * np.sqrt(2 * n - 1)


@dataclass(frozen=True)
class SolveConfig:
    """Solver settings.  ``tol=None`` and ``max_iter=None`` pick per-algorithm defaults."""

    tol: float | None = None
    max_iter: int | None = None
    seed: int = 0
    damping: bool = False
    algorithm: str = "modified_newton"
    selection: str = "subset"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")

    def tol_for(self, n: int) -> float:
        return default_tol(n) if self.tol is None else float(self.tol)

    def max_iter_for(self) -> int:
        return _DEFAULT_MAX_ITER[self.algorithm] if self.max_iter is None else int(self.max_iter)


@dataclass
class SolveReport:
    algorithm: str
    converged: bool
    iterations: int
    residual_history: list
    shifts_per_iter: list
    kkt: KktResiduals
    X_star: np.ndarray
    y_star: DualPoint | None
    wall_time: float
    seed: int = 0
    damping_halvings: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.X_star.shape[0]

    @property
    def time_ms(self) -> float:
        return 1e3 * self.wall_time

    def raise_for_status(self) -> "SolveReport":
        if not self.converged:
            raise MaxIterExceeded(
                f"{self.algorithm} did not converge in {self.iterations} iterations "
                f"(last residual {self.residual_history[-1]:.3e})",
                report=self,
            )
        return self

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "algorithm": self.algorithm,
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "opt_cond": self.kkt.as_dict(),
            "residual_history": [float(v) for v in self.residual_history],
            "shifts_per_iter": [int(s) for s in self.shifts_per_iter],
            "time_ms": float(self.time_ms),
            "seed": int(self.seed),
        }


def _newton_loop(inst, y0, cfg, use_vertex: bool, algorithm: str) -> SolveReport:
    n = inst.n
    tol = cfg.tol_for(n)
    max_iter = cfg.max_iter_for()
    seed = cfg.seed
    rng = np.random.default_rng(seed)
    reseeded = False
    notes = []

    y = inst.zero_dual() if y0 is None else y0
    start = time.perf_counter()
    F, nrm = residual(inst, y)
    history = [nrm]
    shifts = []
    halvings = []
    seen = [y.flat]
    converged = nrm <= tol

    while not converged and len(history) - 1 < max_iter:
        if use_vertex:
            y_v, s = find_vertex(inst, y, rng, selection=cfg.selection)
            F, _ = residual(inst, y_v)
        else:
            y_v, s = y, 0
        shifts.append(s)
        M = sign_split(dual_to_Y(inst, y_v)).M
        d = jacobian_solve(assemble(M), F)
        y_new = DualPoint.from_flat(y_v.flat - d)
        F_new, nrm_new = residual(inst, y_new)

        h = 0
        if cfg.damping:
            step = 1.0
            while nrm_new > history[-1] and h < 20:
                step *= 0.5
                h += 1
                y_new = DualPoint.from_flat(y_v.flat - step * d)
                F_new, nrm_new = residual(inst, y_new)
        halvings.append(h)

        flat = y_new.flat
        scale = 1.0 + np.max(np.abs(flat))
        if nrm_new > tol and any(np.max(np.abs(flat - old)) <= 1e-14 * scale for old in seen):
            if reseeded or not use_vertex:
                report = _finish(inst, y_new, F_new, history + [nrm_new], shifts, halvings,
                                 algorithm, seed, start, False, notes + ["cycling"])
                raise CyclingSuspected("iterate repeated after reseeding", report=report)
            reseeded = True
            rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
            notes.append(f"cycle detected at iteration {len(history)}; vertex selection reseeded")
        seen.append(flat)

        y, F, nrm = y_new, F_new, nrm_new
        history.append(nrm)
        converged = nrm <= tol

    return _finish(inst, y, F, history, shifts, halvings, algorithm, seed, start, converged, notes)


def _finish(inst, y, F, history, shifts, halvings, algorithm, seed, start, converged, notes):
    X = np.maximum(dual_to_Y(inst, y), 0.0)
    if any(halvings):
        notes = notes + [f"damping engaged: {sum(halvings)} step halvings"]
    return SolveReport(
        algorithm=algorithm,
        converged=bool(converged),
        iterations=len(history) - 1,
        residual_history=list(history),
        shifts_per_iter=list(shifts),
        kkt=kkt_report(inst, y),
        X_star=X,
        y_star=y,
        wall_time=time.perf_counter() - start,
        seed=seed,
        damping_halvings=list(halvings),
        notes=list(notes),
    )


def plain_newton(inst: ProblemInstance, y0: DualPoint | None = None, cfg: SolveConfig | None = None) -> SolveReport:
    """Semismooth Newton with the maximal Jacobian element at each iterate.

    Raises :class:`~dsproj.errors.JacobianSingular` as soon as an iterate has
    a disconnected maximal pattern.
    """
    cfg = cfg or SolveConfig(algorithm="plain_newton")
    return _newton_loop(inst, y0, cfg, use_vertex=False, algorithm="plain_newton")


def modified_newton(inst: ProblemInstance, y0: DualPoint | None = None, cfg: SolveConfig | None = None) -> SolveReport:
    """Two-step semismooth Newton: vertex search in the class, then a Newton step.

    The returned report has ``converged=False`` when ``max_iter`` is hit; call
    :meth:`SolveReport.raise_for_status` to turn that into an exception.
    """
    cfg = cfg or SolveConfig()
    return _newton_loop(inst, y0, cfg, use_vertex=True, algorithm="modified_newton")


def solve(inst: ProblemInstance, cfg: SolveConfig | None = None, y0: DualPoint | None = None) -> SolveReport:
    """Dispatch on ``cfg.algorithm``."""
    cfg = cfg or SolveConfig()
    if cfg.algorithm == "modified_newton":
        return modified_newton(inst, y0, cfg)
    if cfg.algorithm == "plain_newton":
        return plain_newton(inst, y0, cfg)
    from . import baselines

    if cfg.algorithm == "admm":
        return baselines.admm_solve(inst, cfg)
    return baselines.dykstra_solve(inst, cfg)


class Subproblem(NamedTuple):
    instance: ProblemInstance
    rows: np.ndarray
    cols: np.ndarray


def split_subproblems(inst: ProblemInstance, y: DualPoint) -> list[Subproblem]:
    """Independent subproblems on the diagonal blocks of ``X = (Y)_+`` at ``y``.

    Near a solution the blocks of ``X`` agree with those of the optimum, so the
    pieces can be solved separately.  Every block must be square.
    """
    part = components(support_pattern(dual_to_Y(inst, y)))
    if part.K < 2:
        raise ValueError("X is connected; nothing to split")
    bad = [(len(r), len(c)) for r, c in zip(part.row_groups, part.col_groups) if len(r) != len(c)]
    if bad:
        raise NonSquareBlock(f"blocks with unequal sides: {bad}")
    return [
        Subproblem(ProblemInstance(inst.Xhat[np.ix_(rows, cols)]), rows, cols)
        for rows, cols in zip(part.row_groups, part.col_groups)
    ]


def assemble_split_solution(n: int, subproblems, solutions) -> np.ndarray:
    X = np.zeros((n, n))
    for sub, Xs in zip(subproblems, solutions):
        X[np.ix_(sub.rows, sub.cols)] = Xs
    return X


def solve_split(inst: ProblemInstance, y: DualPoint, cfg: SolveConfig | None = None) -> np.ndarray:
    """Split at ``y``, solve each block with the modified method and reassemble."""
    cfg = cfg or SolveConfig()
    subs = split_subproblems(inst, y)
    sols = [modified_newton(s.instance, None, cfg).raise_for_status().X_star for s in subs]
    return assemble_split_solution(inst.n, subs, sols)


class SingularityDiagnostic(NamedTuple):
    connected: bool
    strict_complementarity: bool
    min_pattern_singular: bool


def singularity_diagnostic(inst: ProblemInstance, y_star: DualPoint, tol: float | None = None) -> SingularityDiagnostic:
    """Connectivity, strict complementarity and Jacobian singularity at a solution.

    Strict complementarity depends on the chosen ``y_star`` inside the
    solution class, not only on ``X*``.
    """
    _, nrm = residual(inst, y_star)
    tol = 1e-8 * np.sqrt(2 * inst.n - 1) if tol is None else tol
    if nrm > tol:
        raise ValueError(f"y_star is not a solution: ||F|| = {nrm:.3e} > {tol:.3e}")
    Y = dual_to_Y(inst, y_star)
    split = sign_split(Y, tol_pattern=0.0)
    band = default_tol_pattern(Y)
    minimal = support_pattern(Y, band)
    return SingularityDiagnostic(
        connected=is_connected(minimal),
        strict_complementarity=bool(np.all(split.X + split.Z > band)),
        min_pattern_singular=not pd_check(minimal),
    )
