from fastapi import HTTPException, status

from services.errors import ToolkitError


def as_http_error(exc: Exception) -> HTTPException:
    """Domain failure -> HTTP error with the status the error class declares."""
    if isinstance(exc, ToolkitError):
        return HTTPException(status_code=exc.http_status, detail=str(exc))
    return HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(exc))
