"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when arguments violate a documented precondition."""


class CapacityError(RuntimeError):
    """Raised when an exact computation would exceed its configured size limit."""
