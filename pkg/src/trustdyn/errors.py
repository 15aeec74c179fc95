"""Exception types shared across the toolkit."""


class TrustDynError(Exception):
    """Base class for all trustdyn errors."""


class InvalidParamsError(TrustDynError, ValueError):
    """A parameter value violates its documented range or type."""


class UnsupportedPairError(TrustDynError, ValueError):
    """Fitness difference requested for strategies of different populations."""


class ConfigError(TrustDynError):
    """Bad configuration: unknown key, unparsable value, unwritable path."""


class NumericalError(TrustDynError, RuntimeError):
    """A numerical procedure failed: trajectory blow-up, singular solve,
    non-convergent eigen iteration, non-ergodic chain."""
