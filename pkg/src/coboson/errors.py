"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PauliBlockingError(DomainError):
    """More cobosons were requested than there are available modes."""


class UndefinedRatioError(ArithmeticError):
    """A normalization ratio has a vanishing denominator."""


class ConsistencyError(RuntimeError):
    """A computed quantity contradicts a proven identity or bound."""


class ResourceLimitError(RuntimeError):
    """A brute-force construction would exceed its memory guard."""
