"""Exception hierarchy shared across modules."""


class ReconstructionError(ValueError):
    """Base class for every rejection raised by this package."""


class IngestError(ReconstructionError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateTargetError(ReconstructionError):
    """Target degree sum is zero, so the coupling sits on the z=0 boundary."""


class InfeasibleDegreeSumError(ReconstructionError):
    """Target degree sum reaches or exceeds the saturation limit."""


class ConvergenceError(ReconstructionError):
    def __init__(self, message, residual=None, iterations=None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)


class RichClubUndefined(ReconstructionError):
    """The rich-club normalisation (psi - D) / (1 - D) breaks down at D = 1."""
