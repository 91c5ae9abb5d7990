"""Exception types shared across the package."""


class ParasmoothError(Exception):
    """Base class for all errors raised by this package."""


class GridMismatch(ParasmoothError):
    """Two fields (or a field and an operator) live on different grids."""


class NotElliptic(ParasmoothError):
    """A diffusion matrix has a non-positive eigenvalue somewhere on the grid."""


class DecayTooSmall(ParasmoothError):
    """Requested spectral decay exponent leaves the data outside L2."""


class MethodMismatch(ParasmoothError):
    """A closed-form method was requested for a problem it cannot represent."""


class UnstableStep(ParasmoothError):
    """A solver norm escaped its dissipation envelope mid-run."""


class TooManyModes(ParasmoothError):
    """Dense basis request exceeds the representable or storable mode count."""


class WindowTooSparse(ParasmoothError):
    """A fit window contains too few samples to be meaningful."""


class Infeasible(ParasmoothError):
    """No admissible constant satisfies an exponential-envelope bound."""


class ParseError(ParasmoothError):
    """Config text is not well-formed.

    Carries ``line`` and ``column`` (1-based) when the underlying parser
    reports a location, else None.
    """

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(ParasmoothError):
    """Config is well-formed but names an invalid or inconsistent value.

    ``field`` is the dotted path of the offending entry.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class UnknownSuite(ParasmoothError):
    """Requested verification suite name does not exist."""
