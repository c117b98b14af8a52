class WassRigidError(Exception):
    """Base class for all errors raised by this package."""


class DomainMismatch(WassRigidError, ValueError):
    pass


class SpaceMismatch(WassRigidError, ValueError):
    pass


class AmbiguousGeodesic(WassRigidError):
    """Endpoints are joined by several minimizing geodesics and no branch was given."""


class NotExtendable(WassRigidError):
    pass


class NotMinimizing(WassRigidError, ValueError):
    pass


class Unsupported(WassRigidError):
    pass


class NotAnIsometry(WassRigidError, ValueError):
    pass


class IsotropyViolation(WassRigidError, ValueError):
    pass


class BadExponent(WassRigidError, ValueError):
    pass


class SolverStall(WassRigidError):
    pass


class PreconditionError(WassRigidError, ValueError):
    pass


class FormatError(WassRigidError, ValueError):
    """Malformed input file; carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
