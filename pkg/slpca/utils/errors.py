from typing import Optional


class SlpcaError(ValueError):
    """Base class for all semi-linear PCA errors"""

    exit_code = 1


class UsageError(SlpcaError):
    """Invalid input or parameters supplied by the caller"""

    exit_code = 2


class DataFormatError(UsageError):
    """CSV file missing, empty, ragged or unparseable"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        location = ""
        if row is not None:
            location = f" (row {row}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{location}")
        self.row = row
        self.column = column


class DimensionMismatchError(UsageError):
    """Array shapes do not agree"""


class ParameterRangeError(UsageError):
    """A numeric parameter is outside its valid range"""


class NumericalError(SlpcaError):
    """The data do not support the requested computation"""

    exit_code = 1


class ZeroVarianceError(NumericalError):
    """A column has zero variance where a positive one is required"""

    def __init__(self, column_name: str):
        super().__init__(f"Column '{column_name}' has zero variance")
        self.column_name = column_name


class SingularMatrixError(NumericalError):
    """A matrix that must be inverted is singular"""

    def __init__(self, message: str, hint: Optional[str] = None):
        super().__init__(f"{message}. {hint}" if hint else message)
        self.hint = hint


class RankDeficientError(NumericalError):
    """A least-squares design is not of full column rank"""


class DegenerateModelError(NumericalError):
    """The fitted model has a zero noise variance or a singular latent covariance"""


class AllCandidatesFailedError(NumericalError):
    """Every candidate of a model selection failed to fit"""
