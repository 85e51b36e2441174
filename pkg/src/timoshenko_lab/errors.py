"""Exception and warning types shared across the package."""


class TimoshenkoError(Exception):
    """Base class for all package errors."""


class InvalidWaveSpeed(TimoshenkoError, ValueError):
    pass


class DegenerateRoots(TimoshenkoError):
    """Two characteristic roots are closer than the gap tolerance."""


class ZoneViolation(TimoshenkoError, ValueError):
    """A frequency lies outside the zone where an expansion is valid."""


class StepSizeUnderflow(TimoshenkoError):
    pass


class ResolutionError(TimoshenkoError):
    pass


class TailDivergence(TimoshenkoError):
    pass


class InsufficientSamples(TimoshenkoError, ValueError):
    pass


class NonPositiveSample(TimoshenkoError, ValueError):
    pass


class MeanConditionViolated(TimoshenkoError, ValueError):
    pass


class UnknownGenerator(TimoshenkoError, KeyError):
    pass


class NumericalBlowUp(TimoshenkoError, FloatingPointError):
    pass


class ConditioningWarning(UserWarning):
    pass


class TailWarning(UserWarning):
    pass


class ParseError(TimoshenkoError, ValueError):
    """Malformed or unknown entry in a configuration file."""


class ValidationError(TimoshenkoError, ValueError):
    """Configuration values violate one or more invariants."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
