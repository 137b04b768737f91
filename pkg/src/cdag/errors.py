"""Exception types shared across the package.

The CLI maps :class:`InputError` to exit code 1 and :class:`NumericError`
(including :class:`CollinearityError`) to exit code 2.
"""


class CdagError(Exception):
    """Base class for all errors raised by this package."""


class InputError(CdagError):
    """Invalid arguments, malformed files, or violated preconditions."""


class NumericError(CdagError):
    """A computation failed numerically (rank deficiency, non-positive scale)."""


class CollinearityError(NumericError):
    """A candidate parent set is collinear after residualization."""
