"""Exception hierarchy shared by every module."""


class MPCError(Exception):
    """Base class for all errors raised by mpcalc."""


class CoordinateSystemMismatch(MPCError, ValueError):
    pass


class NonzeroConstantPart(MPCError, ValueError):
    pass


class NotClosed(MPCError, ValueError):
    pass


class DegreeError(MPCError, ValueError):
    pass


class KindError(MPCError, TypeError):
    """Raised when forms and multivectors are combined where that makes no sense."""


class NotLocallyHamiltonian(MPCError, ValueError):
    pass


class NotHamiltonian(MPCError, ValueError):
    pass


class NotPoisson(MPCError, ValueError):
    pass


class NotKernelVanishing(MPCError, ValueError):
    pass


class NonProjectable(MPCError, ValueError):
    pass


class WitnessMismatch(MPCError, ValueError):
    pass


class ExprSyntaxError(MPCError, SyntaxError):
    """Parse failure; ``pos`` is the 0-based character offset of the problem."""

    def __init__(self, message, pos):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class GradeError(MPCError, TypeError):
    pass


class UnknownCoordinate(MPCError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown coordinate"
