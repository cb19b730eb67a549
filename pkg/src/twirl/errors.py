"""Exception types shared across the library."""


class TwirlError(Exception):
    """Base class for all library errors."""


class NotEisenstein(TwirlError):
    """The defining polynomial is not Eisenstein at p."""


class PrecisionTooSmall(TwirlError):
    """Requested working precision is below the decidability threshold."""


class PrecisionExhausted(TwirlError):
    """Cancellation pushed the first nonzero digit beyond working precision."""


class DomainError(TwirlError):
    """Argument outside the domain of a partial function."""


class Singular(TwirlError):
    """Matrix (or element) is not invertible."""


class SingularGammaMinusOne(TwirlError):
    """gamma - 1 is not invertible, so the norm preimage is undefined."""


class NotRegular(TwirlError):
    """Element fails the twisted regularity criterion."""


class RelationViolated(TwirlError):
    """Unipotent block data does not satisfy the defining relation."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ClubsuitViolated(TwirlError):
    """Torus data does not satisfy the split-times-compact hypothesis."""


class WindowOverflow(TwirlError):
    """An enumeration hit its provable window boundary; indicates a bug."""


class TailNonzero(TwirlError):
    """A truncation boundary stratum contributed; enlarge the windows."""

    def __init__(self, message, stratum=None):
        super().__init__(message)
        self.stratum = stratum


class NoStabilization(TwirlError):
    """Finite differences of the coefficient table never vanish."""

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table


class UnexpectedPole(TwirlError):
    """Denominator has a pole near the unit circle away from u = 1."""
