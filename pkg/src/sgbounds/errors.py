"""Exception hierarchy.

Everything raised for bad input derives from :class:`ValidationError` (itself a
``ValueError``); numerical breakdowns raise :class:`SolverError`.
"""


class ValidationError(ValueError):
    """Malformed or out-of-domain input."""


class FamilyMismatchError(ValidationError):
    """Two distributions that must share a family (and alphabet) do not."""


class SupportError(ValidationError):
    """An observation has zero density under every hypothesis."""


class UnsupportedError(ValidationError):
    """The requested computation is not available for this input, e.g. exact
    enumeration over a continuous law."""


class EnumerationSizeError(ValidationError):
    """Exact enumeration would exceed the state cap."""


class SolverError(RuntimeError):
    """A numerical routine failed to converge or to bracket a root."""
