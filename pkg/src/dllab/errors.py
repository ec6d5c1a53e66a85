"""Shared exception types."""


class DLLabError(Exception):
    """Base class for library errors."""


class MixedOrderError(DLLabError):
    """Cyclotomic operands with different root orders and no explicit lift."""


class NotInSubfieldError(DLLabError):
    """Element does not lie in the requested subfield."""


class SizeLimitExceededError(DLLabError):
    """An enumeration would exceed the configured size bound."""


class UnsupportedParametersError(DLLabError):
    """Parameter combination outside the supported range."""


class NotInvariantError(DLLabError):
    """Representation is not invariant under the requested conjugation."""


class NoExtensionError(DLLabError):
    """No extension with the requested trace exists."""


class NotIntegralError(DLLabError):
    """An inner product failed to reduce to a nonnegative integer."""


class IdentityFailsError(DLLabError):
    """A claimed sum identity does not hold; carries both values."""


class CharacterMismatchError(DLLabError):
    """Two class functions expected to agree differ; carries the witness."""


class PrecisionLossError(DLLabError):
    """A series operation would leave the tracked precision window."""


class AllZeroError(DLLabError):
    """Valuation of the zero series/matrix requested."""
