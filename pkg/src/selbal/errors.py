"""Error types shared across the package."""


class SelbalError(Exception):
    """Base class for all package errors."""


class ContractViolation(SelbalError):
    """An operation was called with arguments violating its preconditions."""


class ParameterError(SelbalError):
    """Generation parameters are inconsistent or out of their valid range."""


class BudgetExceeded(SelbalError):
    """An enumeration would exceed its configured point budget."""


class ArithmeticOverflow(SelbalError):
    """An accelerated arithmetic path would exceed its integer capacity.

    Exact integer paths use Python's arbitrary-precision integers and cannot
    overflow; this error is reserved for fixed-width fast paths that detect
    they cannot represent a result (they normally fall back to exact
    arithmetic instead of raising).
    """


class PreconditionFailure(SelbalError):
    """A structural verification check failed.

    Carries the name of the failed check so callers can report exactly which
    precondition of the non-balancing argument does not hold.
    """

    def __init__(self, check: str, detail: str = ""):
        self.check = check
        self.detail = detail
        message = check if not detail else f"{check}: {detail}"
        super().__init__(message)
