"""Exceptions raised by the conjugacy-pit library."""

from typing import Optional


class ConjugacyPitError(Exception):
    """Base class for every error raised by the library."""


class DimensionError(ConjugacyPitError, ValueError):
    """Arity or shape of an input does not match what the operation expects."""


class ShapeError(DimensionError):
    """Depth or block sizes of combined circuits do not line up."""


class InterpolationError(ConjugacyPitError, ValueError):
    """Interpolation nodes are not pairwise distinct."""


class EmptyInputError(ConjugacyPitError, ValueError):
    """An operation that needs a nonzero polynomial received zero."""


class ParameterError(ConjugacyPitError, ValueError):
    """A numeric parameter is outside its allowed range."""


class SizeError(ConjugacyPitError, ValueError):
    """An enumeration would exceed its configured cap."""


class SchemaError(ConjugacyPitError, ValueError):
    """An input document does not conform to its schema.

    Args:
        message: what is wrong with the document
        path: location of the offending value, e.g. ``matrices.0.1``
    """

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
