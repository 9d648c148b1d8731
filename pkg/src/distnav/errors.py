"""Exception types shared across the package."""


class GridMismatchError(ValueError):
    """Two objects that must share a time grid (or support grid) do not."""


class NumericalError(RuntimeError):
    """A numerical operation failed beyond recovery (singular matrix, underflow)."""


class ConfigError(ValueError):
    """Invalid configuration, dataset, or command-line input."""
