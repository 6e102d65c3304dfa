"""Exception hierarchy shared by every module."""


class PakmarketError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(PakmarketError, ValueError):
    """An argument lies outside the domain of an operation."""


class ResourceLimitError(PakmarketError):
    """An exhaustive enumeration would exceed the configured guard."""


class InconsistentTotalsError(PakmarketError, ValueError):
    """Aggregate package totals do not come from any nonnegative multiset."""

    def __init__(self, node, value, message=None):
        self.node = node
        self.value = value
        super().__init__(message or f"negative characteristic count {value} at node {node}")


class InfeasiblePartitionError(PakmarketError, ValueError):
    """A multiset requires an incremental cost step that does not exist."""


class ValidationError(PakmarketError, ValueError):
    """Input violates a structural requirement.

    ``clause`` is a short tag naming the violated requirement and ``path`` is
    a JSON pointer when the input came from a document.
    """

    def __init__(self, message, clause=None, path=None):
        self.clause = clause
        self.path = path
        prefix = f"{path}: " if path else ""
        super().__init__(prefix + message)


class AuctionFailure(PakmarketError):
    """The ascending auction exceeded its round guard."""
