"""Exception types raised across the package."""


class FieldError(ValueError):
    pass


class DegreeError(FieldError):
    """Field degree outside the supported range 3..8."""


class ReduciblePolynomialError(FieldError):
    """The modulus polynomial factors over GF(2)."""


class SingularMatrixError(ArithmeticError):
    pass


class SingularBlockError(SingularMatrixError):
    """A 2x2 block that must be invertible is singular."""


class NotInvolutoryError(ValueError):
    pass


class NotMDSError(ValueError):
    pass


class CheckpointError(RuntimeError):
    pass


class CorruptCheckpointError(CheckpointError):
    """Checkpoint bytes fail their CRC or cannot be parsed."""


class VersionMismatchError(CheckpointError):
    """Checkpoint belongs to a different field, ordering or range."""


class BudgetExceededError(RuntimeError):
    """Brute-force request is too large for the requested field."""
