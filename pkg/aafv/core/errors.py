from typing import List, Optional


class AAFVError(Exception):
    """Base error carrying a machine-readable code and the CLI exit status."""

    error_code: str = "UNKNOWN_ERROR"
    exit_code: int = 2

    def __init__(
        self,
        detail: str,
        error_code: Optional[str] = None,
        exit_code: Optional[int] = None
    ):
        super().__init__(detail)
        self.detail = detail
        if error_code is not None:
            self.error_code = error_code
        if exit_code is not None:
            self.exit_code = exit_code

    def to_dict(self) -> dict:
        return {
            "error": {
                "code": self.error_code,
                "message": self.detail
            }
        }


# Custom error types
class ParameterError(AAFVError, ValueError):
    error_code = "VALIDATION_ERROR"
    exit_code = 1

    def __init__(self, detail: str = "Invalid parameter"):
        super().__init__(detail)


class ConfigValidationError(AAFVError):
    error_code = "VALIDATION_ERROR"
    exit_code = 1

    def __init__(self, errors: List[str], source: Optional[str] = None):
        self.errors = list(errors)
        where = f" in {source}" if source else ""
        summary = "; ".join(self.errors)
        super().__init__(f"{len(self.errors)} configuration error(s){where}: {summary}")

    def to_dict(self) -> dict:
        payload = super().to_dict()
        payload["error"]["details"] = self.errors
        return payload


class DataError(AAFVError):
    error_code = "DATA_ERROR"

    def __init__(self, detail: str = "Invalid dataset", row: Optional[int] = None):
        if row is not None:
            detail = f"row {row}: {detail}"
        super().__init__(detail)
        self.row = row


class DimensionMismatchError(AAFVError, ValueError):
    error_code = "DIMENSION_MISMATCH"

    def __init__(self, expected: int, actual: int, what: str = "feature dimension"):
        super().__init__(f"{what} mismatch: expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class NumericalError(AAFVError):
    error_code = "NUMERICAL_ERROR"

    def __init__(self, detail: str = "Non-finite value encountered"):
        super().__init__(detail)


class ProtocolError(AAFVError):
    error_code = "PROTOCOL_ERROR"

    def __init__(self, detail: str = "Protocol setup is invalid"):
        super().__init__(detail)


class ReportError(AAFVError):
    error_code = "REPORT_ERROR"

    def __init__(self, detail: str = "Could not write report"):
        super().__init__(detail)


class AuditViolationError(AAFVError):
    error_code = "AUDIT_VIOLATION"
    exit_code = 3

    def __init__(self, detail: str = "Privacy audit bound violated"):
        super().__init__(detail)
