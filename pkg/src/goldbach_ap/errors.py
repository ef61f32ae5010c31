"""Exception hierarchy shared by all modules."""


class GoldbachError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(GoldbachError, ValueError):
    pass


class InvalidResidueError(InvalidArgumentError):
    """Residue not coprime to its modulus."""


class OutOfRangeError(GoldbachError, ValueError):
    """Argument beyond the range covered by a precomputed table."""


class PoleError(GoldbachError, ValueError):
    """Evaluation at a pole of Gamma or of an L-function."""

    def __init__(self, message, pole=None):
        super().__init__(message)
        self.pole = pole


class KernelSingularityError(PoleError):
    pass


class CertificationError(GoldbachError):
    """Zero search could not be matched against the argument-principle count."""


class TheoremViolationError(GoldbachError):
    """An unconditional theorem appears violated; indicates a numerical bug."""


class IngestionError(GoldbachError, ValueError):
    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class ConfigurationError(GoldbachError, ValueError):
    pass


class TableTooSmallError(OutOfRangeError):
    pass


class QuadratureError(GoldbachError):
    pass
