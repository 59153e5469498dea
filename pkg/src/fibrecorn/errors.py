"""Exception hierarchy shared by all fibrecorn modules."""


class FibrecornError(Exception):
    """Base class for every error raised by this package."""


# -- registry / strata ------------------------------------------------------

class DanglingReference(FibrecornError):
    """A space description refers to an id or name that is not registered."""


class DuplicateId(FibrecornError):
    """Attempt to register a space under an id that is already taken."""


class InvalidStructure(FibrecornError):
    """Operation requires a valid iterated fibration structure.

    Carries the offending validation report in ``report`` when available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DepthZero(FibrecornError):
    """Unfolding requested on a space that is already boundaryless."""


class MissingAnnotations(FibrecornError):
    """A strata poset lacks the link/base data needed to resolve it."""


# -- charts / operators -----------------------------------------------------

class ChartMismatch(FibrecornError):
    """Two operands live on different charts."""


class NotAnSOp(FibrecornError):
    """A differential operator fails the frame-divisibility conditions."""


class NotMinimalInChart(FibrecornError):
    """Boundary symbol requested at a hypersurface that is not minimal."""


class NotDownClosed(FibrecornError):
    """Transport target set is not down-closed in the chart order."""


class MissingDensityData(FibrecornError):
    """Formal adjoint requested on a chart without density exponents."""


class SignatureMismatch(FibrecornError):
    """Suspended operands disagree on fibre chart or suspension variables."""


# -- fredholm ---------------------------------------------------------------

class NotTorusModel(FibrecornError):
    """Operator is outside the decidable torus-model class."""


class EllipticityMissing(FibrecornError):
    """Full-ellipticity check invoked without a certified elliptic symbol."""


# -- parsing / input --------------------------------------------------------

class ParseError(FibrecornError):
    """Expression or document syntax error with a position."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


class MalformedInput(FibrecornError):
    """Input document violates the expected schema."""
