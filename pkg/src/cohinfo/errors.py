"""Exception types raised by cohinfo."""


class CohinfoError(Exception):
    """Base class for library errors."""


class DimensionError(CohinfoError, ValueError):
    """Operands have incompatible shapes or a layout is malformed."""


class NotHermitianError(CohinfoError, ValueError):
    pass


class NotOrthonormalError(CohinfoError, ValueError):
    pass


class InvalidStateError(CohinfoError, ValueError):
    """A matrix or vector fails the density-operator / pure-state checks."""


class InvalidChannelError(CohinfoError, ValueError):
    """Kraus operators are not normalized, or a dilation is not unitary."""


class ConsistencyError(CohinfoError, RuntimeError):
    """Two independent routes to the same quantity disagree.

    This signals a numerical problem or a bug in the library, never bad
    user input.
    """


class CorrectionError(ConsistencyError):
    """The recovery construction found non-orthonormal relative states even
    though the correctability deficit was within tolerance."""
