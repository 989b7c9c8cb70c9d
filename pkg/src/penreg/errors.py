"""Exception types shared across the package.

The CLI maps these onto exit codes: DataError -> 3, NumericalError -> 4.
"""


class DataError(ValueError):
    """Malformed or degenerate input data (parse failures, bad shapes, NaNs)."""


class NumericalError(RuntimeError):
    """A solver or factorization failed on numerically valid input."""


class ConvergenceError(NumericalError):
    """Iteration budget exhausted before reaching the requested tolerance."""

    def __init__(self, message: str, final_kkt: float | None = None):
        super().__init__(message)
        self.final_kkt = final_kkt


class CollinearityError(NumericalError):
    """A required factorization hit an (effectively) singular system."""

    def __init__(self, message: str, indices=None):
        super().__init__(message)
        self.indices = list(indices) if indices is not None else None
