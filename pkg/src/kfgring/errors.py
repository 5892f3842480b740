"""Exception hierarchy shared by the solver modules."""

from __future__ import annotations


class KFGError(Exception):
    """Base class for every error raised by the package."""


class DomainError(KFGError, ValueError):
    """An argument lies outside the domain of a function."""


class SingularPointError(DomainError):
    """Evaluation requested at a singular point (e.g. theta = 0 or pi)."""


class NoBracket(KFGError):
    """The supplied interval does not bracket a sign change."""


class NotBound(KFGError):
    """Energy outside the bound-state window |E| < M."""


class UnsupportedRegime(KFGError):
    """Parameters give a complex exponent (1/4 + beta^2 + lambda < 0)."""


class InfeasibleRing(KFGError):
    """Ring couplings violate m^2 >= gamma (beta - beta')."""


class NoNormalizableGroundState(KFGError):
    """Superpotential constant C >= 0, so exp(-int W) is not normalizable."""


NonNormalizable = NoNormalizableGroundState


class NoBoundState(KFGError):
    """No bound level with the requested node count exists."""


class OracleFailure(KFGError):
    """The brute-force eigensolver could not produce a result."""


class ConvergenceFailure(KFGError):
    """Self-consistent iteration did not converge.

    ``history`` holds the energy iterates, oldest first.
    """

    def __init__(self, message: str, history: list[float] | None = None):
        super().__init__(message)
        self.history = list(history or [])
