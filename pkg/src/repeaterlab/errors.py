"""Exception types raised by repeaterlab."""


class RepeaterError(Exception):
    """Base class for all library errors."""


class DomainError(RepeaterError, ValueError):
    """An argument lies outside the documented domain."""


class SingularParameterError(DomainError):
    """Parameters make a closed-form expression singular (e.g. kappa = 0)."""


class NoEntanglementError(RepeaterError):
    """A generation scheme has zero success probability."""


class InfeasibleParametersError(RepeaterError):
    """Penalties push a fidelity below its physical floor."""


class PathologicalParametersError(RepeaterError):
    """A purification step succeeds with vanishing probability."""


class NoFixedPointError(RepeaterError):
    """Fixed-point iteration failed to converge."""


class AsymptoteOscillationError(NoFixedPointError):
    """The level iteration oscillates between two accumulation points."""

    def __init__(self, message, points):
        super().__init__(message)
        self.points = points
