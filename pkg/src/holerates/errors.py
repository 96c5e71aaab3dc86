"""Exception types shared across the package."""


class AlphabetMismatchError(ValueError):
    """A word and a measure were built over different alphabets."""


class ForbiddenWordError(ValueError):
    """The word uses a transition of probability zero under the given chain."""


class NoPositiveRootError(ArithmeticError):
    """The polynomial has no root in (0, +inf)."""


class EnumerationCapError(RuntimeError):
    """A scan would enumerate more words than the configured cap allows."""
