"""Exception types shared across the package."""

from __future__ import annotations


class DegreeMismatch(ValueError):
    """Two objects that must act on the same point set do not."""


class BudgetExceeded(RuntimeError):
    """An enumeration or search would exceed its configured budget."""

    def __init__(self, what: str, needed: int, limit: int):
        super().__init__(f"{what}: needs {needed}, budget is {limit}")
        self.what = what
        self.needed = needed
        self.limit = limit


class NotTransitive(ValueError):
    """A block-system operation was asked of an intransitive group."""


class PreconditionError(ValueError):
    """An operation's documented precondition does not hold."""


class FormatError(ValueError):
    """A text file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno
