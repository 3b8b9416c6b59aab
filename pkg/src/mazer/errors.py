"""Exception hierarchy shared by every module of the package."""


class MazerError(Exception):
    """Base class for all errors raised by ``mazer``."""


class ValidationError(MazerError, ValueError):
    """Input outside the domain of an operation."""


class NumericalFailure(MazerError, RuntimeError):
    """A solver could not reach its accuracy target.

    The measured flux defect (``| |r|^2 + |t|^2 - 1 |``) is kept on the
    ``defect`` attribute.
    """

    def __init__(self, message, defect=float("nan")):
        super().__init__(message)
        self.defect = defect


class ExpressionSyntaxError(ValidationError):
    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnknownIdentifierError(ValidationError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class ExpressionEvalError(ValidationError):
    """Raised when a custom mode expression cannot be evaluated at some z."""

    def __init__(self, message, z=None):
        self.z = z
        if z is not None:
            message = f"{message} at z={z!r}"
        super().__init__(message)
