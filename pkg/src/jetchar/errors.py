"""Exception hierarchy shared by all modules."""


class JetCharError(Exception):
    """Base class for library errors."""


class ConfigError(JetCharError):
    """Invalid field, module or run configuration."""


class PrecisionError(JetCharError):
    """A result cannot be certified at the available precision."""


class InsufficientPrecision(PrecisionError):
    pass


class PrecisionExhausted(PrecisionError):
    pass


class PrecisionTooLowToCertify(PrecisionError):
    pass


class NotDivisible(JetCharError):
    pass


class NotAUnit(JetCharError):
    pass


class NotInGhostImage(JetCharError):
    pass


class NotInSDagger(JetCharError):
    pass


class StrictnessViolation(JetCharError):
    pass


class LengthMismatch(JetCharError):
    pass


class NonzeroLinearTerm(JetCharError):
    pass


class ConsistencyFailure(JetCharError):
    pass


class IntegralityFailure(JetCharError):
    pass


class CaseNotCovered(JetCharError):
    pass
