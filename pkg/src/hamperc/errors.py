"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RegimeError(ValueError):
    """Parameters fall outside the supercritical regime an operation needs."""


class ConfigError(ValueError):
    """Inconsistent or unusable experiment configuration."""


class ConvergenceError(RuntimeError):
    pass


class BandViolation(AssertionError):
    """A band policy emitted a trial count outside its admissible band.

    This is a programming error in the policy, never a user error.
    """
