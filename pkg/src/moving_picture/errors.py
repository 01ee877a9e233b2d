"""Exception types raised by the library."""


class MovingPictureError(ValueError):
    """Base class for all library errors."""


class GridError(MovingPictureError):
    """Invalid grid construction (bad range or too few points)."""


class GridMismatchError(MovingPictureError):
    """Operands live on different grids."""


class NonHermitianError(MovingPictureError):
    """A Hermitian operator was required."""


class SingularTimeError(MovingPictureError):
    """Evaluation requested at a caustic or outside the allowed time window."""


class DomainError(MovingPictureError):
    """Argument outside the domain of an operation."""
