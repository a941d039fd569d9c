"""Exception types shared across the simulator."""


class GausimError(Exception):
    """Base class for simulator-specific errors."""


class RejectedChannelError(GausimError):
    """Channel failed the complete-positivity check and cannot be applied."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NonGaussianOutcomeError(GausimError):
    """Conditioning on this outcome leaves the Gaussian state family.

    Raised when a circuit conditions on the absorption ("one or more
    photons") outcome of a threshold photodetector.  The post-measurement
    state has no means/covariance description, so the engine refuses rather
    than silently producing a wrong state.  ``absorption_probability``
    carries the probability of the rejected branch so callers can account
    for it.
    """

    def __init__(self, message, absorption_probability):
        super().__init__(message)
        self.absorption_probability = absorption_probability


class ImpossibleOutcomeError(GausimError):
    """Requested outcome has (numerically) zero probability."""


class DegenerateMeasurementError(GausimError):
    """Outcome covariance is singular; conditioning is ill-posed."""


class CutoffTooSmallError(GausimError):
    """Fock-space truncation lost more norm than the requested bound."""

    def __init__(self, message, norm_deficit):
        super().__init__(message)
        self.norm_deficit = norm_deficit


class CircuitError(GausimError):
    """Base class for circuit text/IR errors."""


class CircuitSyntaxError(CircuitError):
    """Malformed circuit text."""

    def __init__(self, line, col, expected, found):
        super().__init__(
            f"line {line}, col {col}: expected {expected}, found {found!r}"
        )
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found


class CircuitSemanticError(CircuitError):
    """Well-formed text that violates static circuit rules.

    Covers unknown modes, registers read before being written, register
    redefinition, and arity mismatches.
    """

    def __init__(self, message, instruction_index=None, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.instruction_index = instruction_index
        self.line = line
