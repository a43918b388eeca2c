"""Exception hierarchy.

Validation problems derive from :class:`ValidationError` (also a ``ValueError``);
failures of a numerical procedure derive from :class:`NumericalError`. The CLI
maps the two families onto exit codes 1 and 2.
"""


class AtomCavError(Exception):
    """Base class for all package errors."""


class ValidationError(AtomCavError, ValueError):
    pass


class NumericalError(AtomCavError, ArithmeticError):
    pass


# -- parameters ---------------------------------------------------------------

class NonPositiveN(ValidationError):
    pass


class NegativeEta(ValidationError):
    pass


class NonFiniteField(ValidationError):
    pass


# -- integration --------------------------------------------------------------

class StepTooCoarse(ValidationError):
    pass


class NonFiniteAmplitude(NumericalError):
    pass


class OracleTooLarge(ValidationError):
    pass


# -- spectral -----------------------------------------------------------------

class InnerDenominatorZero(NumericalError, ZeroDivisionError):
    pass


class NoMinimaFound(NumericalError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, seed, message="Muller iteration did not converge"):
        super().__init__(f"{message} (seed={seed!r})")
        self.seed = seed


class EmptyPoleSet(ValidationError):
    pass


class NoBoundState(NumericalError):
    pass


# -- intensity / experiments --------------------------------------------------

class TrajectoryTooShort(ValidationError):
    pass


class PhaseUndefined(NumericalError):
    pass


# -- configuration ------------------------------------------------------------

class ParseError(ValidationError):
    pass


class UnknownKey(ValidationError):
    pass
