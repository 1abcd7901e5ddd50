"""Exception hierarchy.

Every error raised by the toolkit derives from :class:`SpdcError`.  The CLI
maps :class:`ConfigError` subclasses to exit code 2 and
:class:`ConvergenceError` subclasses to exit code 3.
"""


class SpdcError(Exception):
    """Base class for toolkit errors."""


class ConfigError(SpdcError, ValueError):
    """Invalid input or configuration."""


class ConvergenceError(SpdcError, ArithmeticError):
    """A numerical method failed to reach its tolerance."""


class NonPositiveInput(ConfigError):
    pass


class OutOfRange(ConfigError):
    pass


class UnknownAxis(ConfigError):
    pass


class MissingEntry(ConfigError):
    """A tabulated material has no entry (or no value) for the query."""


class EnergyMismatch(ConfigError):
    pass


class ZeroMismatch(ConfigError):
    pass


class ZeroOrder(ConfigError):
    pass


class EvenOrder(ConfigError):
    pass


class WrongRegime(ConfigError):
    pass


class FilterTooWide(ConfigError):
    pass


class AsymmetricMatrix(ConfigError):
    pass


class OverLossyStep(ConfigError):
    pass


class DivergentSeries(ConfigError):
    pass


class UnequalParameters(ConfigError):
    pass


class SingularDenominator(ConfigError):
    pass


class ZeroCoupling(ConfigError):
    pass


class GridTooCoarse(ConfigError):
    pass


class CutoffTooSmall(ConfigError):
    pass


class NoCoincidences(ConfigError):
    pass


class QuadratureNonConvergent(ConvergenceError):
    pass


class ToleranceNotMet(ConvergenceError):
    pass
