"""Exception types shared across the package."""


class StructuralError(ValueError):
    """An input violates a structural invariant (crossing, closure, shapes)."""


class CapacityError(RuntimeError):
    """An exhaustive computation would exceed its configured cap."""


class ValidationError(ValueError):
    """A parameter or configuration value is invalid."""
