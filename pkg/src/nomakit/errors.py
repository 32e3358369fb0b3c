"""Exception types raised by nomakit."""


class NomaError(ValueError):
    """Base class for all library errors."""


class DomainError(NomaError):
    """An argument lies outside the domain of the operation."""


class OrderingError(NomaError):
    """Users were passed in the wrong channel-strength order."""


class InfeasibleError(NomaError):
    """A requested rate or operating point cannot be achieved."""


class ConfigError(NomaError):
    """A simulation configuration is missing a key or violates an invariant."""
