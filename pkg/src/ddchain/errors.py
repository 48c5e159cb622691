"""Exception hierarchy shared across the package.

The CLI maps these onto stable exit codes: validation problems -> 2,
resource refusals -> 3, numerical failures (branch ambiguity, lost
unitarity) -> 4.
"""


class ValidationError(ValueError):
    """Invalid input: bad parameters, malformed files, mismatched shapes."""


class DimensionError(ValidationError):
    """Operands live on different numbers of qubits."""


class ResourceError(RuntimeError):
    """Request exceeds a configured size/memory cap."""


class NumericalError(RuntimeError):
    """A numerical procedure failed in a detectable way."""


class BranchAmbiguityError(NumericalError):
    """Matrix-log eigenphase too close to the +/-pi branch cut."""
