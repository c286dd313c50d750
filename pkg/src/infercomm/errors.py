"""Shared exception types."""


class ConfigurationError(ValueError):
    """Shapes, names, or settings are inconsistent with each other."""


class InputError(ValueError):
    """A caller passed a value outside the operation's domain."""


class GraphStateError(RuntimeError):
    """An autodiff call happened out of order (e.g. backward without forward)."""


class NumericError(ArithmeticError):
    """Non-finite values where finite ones are required."""


class DivergenceError(RuntimeError):
    """Training produced NaN/inf; carries the offending parameter or batch info."""
