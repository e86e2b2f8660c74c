"""Exception hierarchy shared across the package.

Every exception carries an ``exit_code`` used by the CLI: 2 for input or
configuration validation, 3 for computation failures, 4 for I/O.
"""


class RankSpectraError(Exception):
    exit_code = 3


class ValidationError(RankSpectraError, ValueError):
    exit_code = 2


class TiesError(ValidationError):
    """Exactly equal values where a continuous sample is required."""


class ArityError(ValidationError):
    """Tuple length does not match the kernel order."""


class SizeError(ValidationError):
    """Sample too small for the requested statistic."""


class RangeError(ValidationError):
    """Malformed numeric range."""


class DomainError(ValidationError):
    """Argument outside the mathematical domain of the operation."""


class MarginError(ValidationError):
    """Data incompatible with the margin expected by the operation."""


class ComplexityGuardError(RankSpectraError):
    """Requested enumeration exceeds the configured work budget."""


class MemoryGuardError(RankSpectraError):
    """Requested experiment exceeds the configured memory guard."""


class SymmetryError(ValidationError):
    """Matrix is not symmetric within tolerance."""


class ConvergenceError(RankSpectraError):
    """Iterative solver failed to converge; message carries diagnostics."""
