"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`CurvCanonError`, so callers (and the CLI) can separate expected
failures from bugs.
"""


class CurvCanonError(Exception):
    """Base class for all package errors."""


class ValidationError(CurvCanonError):
    """Curve data failed validation."""


class NotSquarefree(ValidationError):
    def __init__(self, message, roots=()):
        super().__init__(message)
        self.roots = tuple(roots)


class SingularCurve(ValidationError):
    pass


class UnsupportedDegree(ValidationError):
    pass


class ParseError(CurvCanonError):
    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ChartInvalid(CurvCanonError):
    pass


class NotOnCurve(CurvCanonError):
    pass


class NoConvergence(CurvCanonError):
    """Quadrature refinement stalled; the best estimate is attached."""

    def __init__(self, message, estimate=None, rel_error=None, report=None):
        super().__init__(message)
        self.estimate = estimate
        self.rel_error = rel_error
        self.report = report


class SingularitySaturation(CurvCanonError):
    pass


class NotPositiveDefinite(CurvCanonError):
    pass


class RankDeficient(CurvCanonError):
    pass


class PointsNotDistinct(CurvCanonError):
    pass


class GateFailed(CurvCanonError):
    pass


class AgreementFailed(CurvCanonError):
    def __init__(self, message, divisor=None, rel_dev=None):
        super().__init__(message)
        self.divisor = divisor
        self.rel_dev = rel_dev
