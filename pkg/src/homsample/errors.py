"""Exception types shared across the package."""


class DataError(Exception):
    """Malformed or inconsistent input data (files, shapes, label ranges)."""


class NumericalError(Exception):
    """A numerical computation failed (divergence, non-finite values)."""
