"""Exception types shared across the package."""


class ChainChaosError(Exception):
    """Base class for all package errors."""


class ValidationError(ChainChaosError):
    """A system description violates its structural requirements."""


class DomainError(ChainChaosError):
    """A point lies outside the space of the system."""


class InputError(ChainChaosError):
    """Malformed input: unknown vertex, empty schedule, bad flag value."""


class PreconditionError(ChainChaosError):
    """A stated precondition of an operation does not hold."""


class SFTError(ChainChaosError):
    """A symbol sequence or word is not admissible for the shift system."""


class SearchError(ChainChaosError):
    """A required combinatorial search came up empty."""


class StoreError(ChainChaosError):
    """Result store corruption or lookup failure."""
