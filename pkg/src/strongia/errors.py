"""Exception types shared across the package."""


class StrongIAError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(StrongIAError, ValueError):
    """An argument violates a documented precondition (non-finite data, bad count, ...)."""


class ShapeError(InvalidInputError):
    """Operands have incompatible dimensions."""


class ConfigError(StrongIAError, ValueError):
    """An experiment or channel configuration is inconsistent."""


class SingularChannelError(StrongIAError):
    """A channel matrix that must be inverted has a zero diagonal entry."""


class DegenerateChannelError(StrongIAError):
    """A construction that is full rank for generic channels came out rank deficient.

    Occurs with probability zero for continuous channel draws; callers
    typically resample the realization.
    """


class IllConditionedError(StrongIAError):
    """A linear system required by a receiver is numerically singular."""
