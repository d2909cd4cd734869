from typing import Any, Optional


class AlternaException(Exception):
    """Base error carrying a status code and a detail message."""

    status_code: int = 500

    def __init__(self, detail: str, status_code: Optional[int] = None, **context: Any):
        super().__init__(detail)
        self.detail = detail
        if status_code is not None:
            self.status_code = status_code
        self.context = context

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "detail": self.detail, "status_code": self.status_code, **self.context}


class AlgebraValidationError(AlternaException):
    status_code = 422

    def __init__(self, detail: str, invariant: str, **context: Any):
        super().__init__(detail, invariant=invariant, **context)
        self.invariant = invariant


class DimensionMismatchError(AlternaException):
    status_code = 400


class IndexRangeError(AlternaException):
    status_code = 400


class SingularityError(AlternaException):
    status_code = 422


class QuadratureError(AlternaException):
    status_code = 422


class DomainError(AlternaException):
    status_code = 422


class ConfigurationError(AlternaException):
    status_code = 400


class StepUnderflowError(AlternaException):
    status_code = 422
