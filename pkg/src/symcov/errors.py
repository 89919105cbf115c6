"""Exception hierarchy shared by all symcov modules."""


class SymcovError(Exception):
    """Base class for every error raised by symcov."""


class InvalidInput(SymcovError, ValueError):
    """Malformed argument: wrong shape, asymmetric matrix, bad parameter."""


class DimMismatch(InvalidInput):
    """Operands have incompatible dimensions."""


class InvalidSample(InvalidInput):
    """A sample set contains a zero vector or non-finite entries."""


class InvalidShape(InvalidInput):
    """MGGD shape parameter outside (0, 1]."""


class NotPositiveDefinite(SymcovError, ArithmeticError):
    """A matrix that must be SPD has an eigenvalue below the floor."""


class RankDeficient(NotPositiveDefinite):
    """An estimate collapsed to a singular matrix (typically n < p)."""


class IoError(SymcovError, OSError):
    """Reading or writing a file failed; carries the offending path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = str(path)
