"""Custom exception hierarchy for oos-infer."""

from typing import Any, Optional


class OosInferError(Exception):
    """Base exception for all oos-infer errors."""

    # Process exit status used by the CLI: 1 usage/config, 2 data/numeric.
    exit_code = 2

    def __init__(self, message: str, code: int = 2000, data: Any = None):
        """Initialize error.

        Args:
            message: Error message
            code: Numeric error code
            data: Additional error data
        """
        super().__init__(message)
        self.message = message
        self.code = code
        self.data = data

    def to_dict(self) -> dict[str, Any]:
        """Convert to a serializable error record.

        Returns:
            Error dictionary
        """
        error = {
            "code": self.code,
            "message": self.message
        }
        if self.data is not None:
            error["data"] = self.data
        return error


class ValidationError(OosInferError):
    """Invalid input data or parameters."""

    exit_code = 1

    def __init__(self, message: str, field: Optional[str] = None, code: int = 1001):
        """Initialize validation error.

        Args:
            message: Error message
            field: Field name that failed validation
            code: Numeric error code
        """
        data = {"field": field} if field else None
        super().__init__(message, code=code, data=data)
        self.field = field


class ConfigurationError(OosInferError):
    """Run configuration or setup error."""

    exit_code = 1

    def __init__(self, message: str, config_field: Optional[str] = None):
        """Initialize configuration error.

        Args:
            message: Error message
            config_field: Configuration key that's problematic
        """
        data = {"config_field": config_field} if config_field else None
        super().__init__(message, code=1002, data=data)
        self.config_field = config_field


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation."""

    def __init__(self, message: str, field: Optional[str] = None):
        """Initialize domain error.

        Args:
            message: Error message
            field: Offending argument name
        """
        super().__init__(message, field=field, code=1003)


class InvalidSplitError(ValidationError):
    """In-sample/out-of-sample partition cannot be formed."""

    def __init__(self, message: str, field: Optional[str] = None):
        """Initialize invalid split error.

        Args:
            message: Error message
            field: Split parameter at fault ("pi" or "R")
        """
        super().__init__(message, field=field, code=1004)


class InsufficientDataError(OosInferError):
    """Series too short for the requested operation."""

    def __init__(self, message: str, required: Optional[int] = None, available: Optional[int] = None):
        """Initialize insufficient data error.

        Args:
            message: Error message
            required: Minimum number of observations needed
            available: Number of observations supplied
        """
        data = {"required": required, "available": available}
        super().__init__(message, code=2001, data=data)
        self.required = required
        self.available = available


class DataParseError(OosInferError):
    """Input file could not be parsed into a numeric series."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        """Initialize parse error.

        Args:
            message: Error message
            row: Zero-based data row index of the offending cell
            column: Column being parsed
        """
        data = {"row": row, "column": column}
        super().__init__(message, code=2002, data=data)
        self.row = row
        self.column = column


class SingularDesignError(OosInferError):
    """Training Gram matrix is singular or too ill-conditioned."""

    def __init__(self, message: str, condition_number: Optional[float] = None):
        """Initialize singular design error.

        Args:
            message: Error message
            condition_number: Estimated condition number of the Gram matrix
        """
        data = {"condition_number": condition_number} if condition_number is not None else None
        super().__init__(message, code=2003, data=data)
        self.condition_number = condition_number


class DivergenceError(OosInferError):
    """Iterative training produced a non-finite objective."""

    def __init__(self, message: str, epoch: int, learning_rate: float):
        """Initialize divergence error.

        Args:
            message: Error message
            epoch: Epoch at which the objective became non-finite
            learning_rate: Step size in use
        """
        data = {"epoch": epoch, "learning_rate": learning_rate}
        super().__init__(message, code=2004, data=data)
        self.epoch = epoch
        self.learning_rate = learning_rate


class DegenerateEstimatorError(OosInferError):
    """Estimator is identically zero, so a self-normalized statistic is undefined."""

    def __init__(self, message: str):
        """Initialize degenerate estimator error.

        Args:
            message: Error message
        """
        super().__init__(message, code=2005)


class DegenerateVarianceError(OosInferError):
    """Sequence has no variation, so a variance-based statistic is undefined."""

    def __init__(self, message: str):
        """Initialize degenerate variance error.

        Args:
            message: Error message
        """
        super().__init__(message, code=2006)
