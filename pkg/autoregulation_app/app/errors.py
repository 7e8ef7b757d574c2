"""
Exception hierarchy for the toolkit.

Every error carries a human readable `detail`. The CLI prints it to stderr and
exits with status 1.
"""

class AutoregError(Exception):
    """Base class for all toolkit errors."""
    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

class SignalError(AutoregError):
    """Invalid signal input (empty baseline window, short signal, length mismatch)."""

class CsvFormatError(SignalError):
    """Subject CSV that violates the time,abp,cbfv contract."""

class ClassificationError(AutoregError):
    """Template matching cannot produce an index (e.g. undefined correlation)."""

class SingularSystemError(AutoregError):
    """Least-squares design matrix is rank deficient and no ridge was supplied."""

class TrainingDivergenceError(AutoregError):
    """Gray-box training produced a non-finite loss."""
    def __init__(self, detail: str, epoch: int):
        super().__init__(detail)
        self.epoch = epoch

class CohortError(AutoregError):
    """Cohort input that cannot be paired or planned."""

class ParameterError(AutoregError, ValueError):
    """Numeric parameter outside its domain (negative ridge, non-positive sampling frequency)."""

class SimulationError(AutoregError):
    """Autoregulation model state became non-finite."""

class FileFormatError(AutoregError):
    """Coefficient, model or manifest JSON that cannot be parsed."""
