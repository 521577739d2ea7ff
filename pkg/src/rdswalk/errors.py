"""Exception types shared across the toolkit."""


class RdsWalkError(Exception):
    """Base class for all toolkit errors."""


class InputError(RdsWalkError, ValueError):
    """Malformed input data or invalid parameter values."""


class StructuralError(RdsWalkError, ValueError):
    """Graph structure violates an operation's requirements (e.g. no edges,
    zero out-degree, not strongly connected)."""


class ConvergenceError(RdsWalkError, RuntimeError):
    """Iterative solver failed to reach the requested tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class GenerationError(RdsWalkError, RuntimeError):
    """Random graph generation gave up after exhausting its retry budget."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class EstimationError(RdsWalkError, ValueError):
    """Estimator hit a degenerate or out-of-domain configuration."""


class AllocationError(RdsWalkError, ValueError):
    """Property allocation target cannot be met on the given graph."""


class CoverageError(RdsWalkError, ValueError):
    """A sampled vertex has no probability in the supplied estimate."""
