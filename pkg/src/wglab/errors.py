"""Exception types shared across the package."""


class InputError(ValueError):
    """An argument violates a documented precondition."""


class SizeLimitError(InputError):
    """A brute-force routine was asked to exceed its hard size limits."""


class NumericError(RuntimeError):
    """A numerical routine could not reach its accuracy target."""


class UndefinedMeasureError(ValueError):
    """An operation needs a surface measure with positive total mass."""
