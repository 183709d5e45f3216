"""Exception types shared across the package."""


class DataError(ValueError):
    """Base class for problems with input data files."""


class SchemaError(DataError):
    """A required CSV column is missing."""


class DataOrderError(DataError):
    """Dates are not strictly increasing."""


class TooShortError(DataError):
    """Not enough usable rows."""


class DegenerateScaleError(ValueError):
    """Min-max scaling requested on a constant slice."""


class DegenerateComparisonError(ValueError):
    """Welch test on two zero-variance samples with equal means."""


class InternalCorruptionError(RuntimeError):
    """Model weights became non-finite."""
