"""Exception hierarchy. Every domain failure derives from :class:`DomainError`."""
from __future__ import annotations


class DomainError(Exception):
    """An input is well-formed but violates a mathematical precondition."""


class ContextError(DomainError):
    """Elements from different generator contexts were combined."""


class IllegalMoveError(DomainError):
    """A tame move, event or certificate does not satisfy its hypotheses."""


class SearchSpaceError(DomainError):
    """An exhaustive search would exceed its candidate cap."""


class UndefinedAugmentationError(DomainError):
    """An augmentation is evaluated on a generator outside its domain."""


class HypothesisViolation(DomainError):
    """A hypothesis of a structural check (gap, degree, dimension) fails."""


class ParseError(DomainError):
    """A document is malformed; ``path`` locates the offending field."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class ChainMapError(DomainError):
    """A matrix fails to be a chain map; ``pairs`` lists offending (source, target) names."""

    def __init__(self, message: str, pairs: list[tuple[str, str]]):
        super().__init__(message)
        self.pairs = pairs
