"""Exception types shared across the package."""


class McmrError(Exception):
    """Base class for all package errors."""


class InvalidInputError(McmrError):
    """A model object or input file violates a structural constraint.

    `code` is a stable machine-readable identifier, `path` points at the
    offending field when the input came from a file.
    """

    def __init__(self, code: str, message: str, path: str = ""):
        self.code = code
        self.path = path
        super().__init__(f"{code}: {message}" + (f" (at {path})" if path else ""))


class EnumerationCapError(McmrError):
    """Activation-set enumeration exceeded the configured cap."""


class BudgetExceededError(McmrError):
    """A placement search would evaluate more candidates than allowed."""


class ExactBackendError(McmrError):
    """The exact backend was asked to handle an irrational quantity."""


class SolverError(McmrError):
    """Internal failure of the LP solver (iteration cap, bad model)."""
