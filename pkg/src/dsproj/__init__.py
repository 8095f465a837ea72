"""Nearest doubly stochastic matrix by a two-step semismooth Newton method."""

from .core import DualPoint, KktResiduals, ProblemInstance, kkt_report, residual
from .errors import (
    CyclingSuspected,
    DSProjError,
    InstanceTooLarge,
    InvalidSelection,
    JacobianSingular,
    MaxIterExceeded,
    NoFiniteShift,
    NonSquare,
    NonSquareBlock,
    ParseError,
)
from .solver import SolveConfig, SolveReport, modified_newton, plain_newton, solve


def nearest_doubly_stochastic(Xhat, **config):
    """Projection of ``Xhat`` onto the doubly stochastic matrices.

    Keyword arguments go to :class:`SolveConfig`.  Raises
    :class:`MaxIterExceeded` if the solver does not converge.
    """
    return solve(ProblemInstance(Xhat), SolveConfig(**config)).raise_for_status().X_star


__version__ = "0.1.0"
