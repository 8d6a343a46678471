"""Exception hierarchy shared by all modules.

Each class maps to one CLI exit code.
"""


class ToricPeriodsError(Exception):
    """Base class. ``module`` records which component raised."""

    exit_code = 4

    def __init__(self, message: str, module: str = ""):
        super().__init__(message)
        self.module = module

    def __str__(self) -> str:
        base = super().__str__()
        return f"[{self.module}] {base}" if self.module else base


class DomainError(ToricPeriodsError, ValueError):
    """Input outside the domain of an operation."""

    exit_code = 2


class ConditionViolation(DomainError):
    """A hypothesis of the global formula fails (wrong sign, gcd, parity)."""


class UnsupportedConfiguration(DomainError):
    """A valid input that this implementation deliberately does not handle."""


class PrecisionShortfall(ToricPeriodsError):
    """A numerical target was not met; ``achieved`` holds the attained bound."""

    exit_code = 3

    def __init__(self, message: str, achieved: float | None = None, module: str = ""):
        super().__init__(message, module)
        self.achieved = achieved


class InternalInvariantError(ToricPeriodsError, AssertionError):
    """A self-check failed; this always indicates a bug."""

    exit_code = 4


class InsufficientSeparation(ToricPeriodsError):
    """Hecke operators at the supplied primes do not cut out a line."""

    exit_code = 4
