"""Exception hierarchy shared by every module of the package."""


class PadeBrocardError(Exception):
    """Base class for all errors raised by this package."""


class ZeroPolynomial(PadeBrocardError, ValueError):
    pass


class ZeroInput(PadeBrocardError, ValueError):
    pass


class NotPrime(PadeBrocardError, ValueError):
    pass


class OutOfDomain(PadeBrocardError, ValueError):
    pass


class LemmaViolation(PadeBrocardError):
    """A structural check failed. Carries the failing witness.

    These never fire on a correct implementation; seeing one means either a
    bug or a deliberately corrupted input.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PropertyViolation(LemmaViolation):
    """One of the four approximant properties failed; witness holds both sides."""


class BoundNotMet(PadeBrocardError):
    pass


class BudgetExceeded(PadeBrocardError):
    pass


class DegenerateConfig(PadeBrocardError, ValueError):
    pass


class ConstructionFailed(PadeBrocardError):
    pass


class RankDeficient(PadeBrocardError):
    pass


class PreconditionFailed(PadeBrocardError, ValueError):
    pass


class ThetaTooLarge(PadeBrocardError, ValueError):
    pass


class DegenerateParams(PadeBrocardError, ValueError):
    pass


class FloorAmbiguous(PadeBrocardError):
    """A certified decision could not be reached within the precision cap."""


class NotASolutionTriple(PadeBrocardError, ValueError):
    pass


class DegreeMismatch(PadeBrocardError, ValueError):
    pass


class UnknownLemma(PadeBrocardError, KeyError):
    pass
