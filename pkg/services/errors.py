"""
Domain errors shared by the services, the HTTP routes and the CLI.

Every error carries a stable process exit code and the HTTP status the routes
answer with, so both surfaces report the same failure the same way.
"""
from starlette import status


class ToolkitError(Exception):
    """Base class for all toolkit failures."""
    exit_code = 3
    http_status = status.HTTP_422_UNPROCESSABLE_ENTITY


class UsageError(ToolkitError):
    """Bad command-line usage (wrong flag combination, bad range syntax)."""
    exit_code = 1
    http_status = status.HTTP_400_BAD_REQUEST


class InputError(ToolkitError):
    """Input that cannot be parsed or does not match the expected shapes."""
    exit_code = 2
    http_status = status.HTTP_400_BAD_REQUEST


class ParseError(InputError):
    pass


class LengthMismatch(InputError):
    pass


class TooShort(InputError):
    pass


class TooFewVertices(InputError):
    pass


class NumericalError(ToolkitError):
    """The inputs were well formed but the computation cannot proceed."""
    exit_code = 3
    http_status = status.HTTP_422_UNPROCESSABLE_ENTITY


class NonPositiveDepth(NumericalError):
    pass


class BehindCamera(NumericalError):
    pass


class InitializationError(NumericalError):
    pass


class DivergedError(NumericalError):
    pass


class DegenerateConfiguration(NumericalError):
    pass


class ZeroPathLength(NumericalError):
    pass


class CropInvarianceViolation(NumericalError):
    pass
