"""Exception types shared across the package."""


class AesetError(ValueError):
    """Base class for all argument/contract violations raised by aeset."""


class InvalidDimensionError(AesetError):
    """Hilbert-space dimension is out of range or inconsistent."""


class InvalidCountError(AesetError):
    """A requested count (states, samples, ...) is out of range."""


class PartitionMismatchError(AesetError):
    """A partition does not multiply out to the state dimension."""


class TooManyStatesError(AesetError):
    """More states than the operation can handle (e.g. N > dim)."""


class BoundExceededError(AesetError):
    """Input exceeds the bound under which a construction is guaranteed."""


class UnsupportedConfigurationError(AesetError):
    """Configuration outside the scope of the requested method."""


class NotUnitaryError(AesetError):
    """A matrix claimed to be unitary is not, within tolerance."""


class SearchFailedError(AesetError):
    """A parameter search terminated without finding a solution."""
