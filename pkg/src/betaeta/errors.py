"""Exception hierarchy shared by all betaeta modules."""


class BetaEtaError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(BetaEtaError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class IllTyped(BetaEtaError):
    """A term construction or check violated the typing rules."""


class UnboundVariable(BetaEtaError):
    pass


class TypeMismatch(BetaEtaError):
    pass


class SideConditionViolated(BetaEtaError):
    """A combinator was requested outside its level constraints."""


class LevelTooSmall(BetaEtaError):
    """A numeral level is below the minimum required by a construction."""


class Overflow(BetaEtaError):
    """A cardinality, code or measure exceeded the configured budget."""


class ResourceExhausted(BetaEtaError):
    """Normalization exceeded the configured memory/work budget."""


class EqualTerms(BetaEtaError):
    """Separation was requested for a provably equal pair."""


class EqualArrows(BetaEtaError):
    """Collapse was requested for a provably equal pair of arrows."""


class NotSeparable(BetaEtaError):
    """No distinguishing model was found within the search budget."""

    def __init__(self, max_base):
        super().__init__(f"no distinguishing model with base <= {max_base}")
        self.max_base = max_base


class IllFormed(BetaEtaError):
    """An arrow term violated the source/target composition rules."""


class IndexOutOfRange(BetaEtaError):
    pass


class BadCertificate(BetaEtaError):
    """A certificate could not be decoded or replayed."""
