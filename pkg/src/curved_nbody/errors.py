"""Exception hierarchy shared by all modules."""


class CurvedNBodyError(Exception):
    """Base class for errors raised by this package."""


class DomainError(CurvedNBodyError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConstraintViolation(DomainError):
    """A point or velocity is off the surface (or off its tangent plane)."""


class SingularityError(CurvedNBodyError, ArithmeticError):
    """The configuration lies in the singular set of the equations of motion.

    Attributes
    ----------
    pairs : list of (int, int)
        Offending body pairs, ``i < j``.
    kind : str
        ``"collision"``, ``"antipodal"`` or ``"collision_antipodal"``.
    """

    def __init__(self, message, pairs=(), kind="collision"):
        super().__init__(message)
        self.pairs = [tuple(p) for p in pairs]
        self.kind = kind
