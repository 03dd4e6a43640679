"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class LdpcError(Exception):
    """Base class for all errors raised by dmldpc."""


class PreconditionError(LdpcError, ValueError):
    """An input violates the documented precondition of an operation."""


class FormatError(LdpcError, ValueError):
    """A text file (alist, exponent grid, difference array) is malformed."""


class ResourceLimitError(LdpcError):
    """A search or enumeration would exceed its configured budget."""


class SearchBudgetExceeded(ResourceLimitError):
    """The stopping-set search visited more nodes than allowed."""


class DimensionCapExceeded(ResourceLimitError):
    """Brute-force enumeration was refused because the code dimension is too large."""
