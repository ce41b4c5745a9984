"""Shared exception types."""


class DerangeError(Exception):
    """Base class for all package errors."""


class CapExceeded(DerangeError):
    """A closure enumeration hit its element cap.

    `partial` is the number of distinct elements found before giving up.
    """

    def __init__(self, partial, cap):
        self.partial = partial
        self.cap = cap
        super().__init__(f"closure exceeded cap {cap} (found {partial} elements before stopping)")


class NotTransitive(DerangeError):
    """Operation defined only for transitive actions."""


class SpecFileError(DerangeError):
    """Malformed group-spec file; carries line/column diagnostics."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)


class ConstructionError(DerangeError):
    """A family constructor failed its self-check (order formula, search, ...)."""
