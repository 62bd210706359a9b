class RehorizonError(Exception):
    """Base class for every error raised by rehorizon."""


class ConfigurationError(RehorizonError, ValueError):
    """Invalid parameters, objective/variant mismatch or missing resources."""


class IncompleteSolutionError(RehorizonError, ValueError):
    """A solution lacks a machine or start time for a required operation."""


class UndefinedMetricError(RehorizonError, ArithmeticError):
    """A ratio metric was requested with a zero (or degenerate) denominator."""


class InfeasibleOrderError(RehorizonError, RuntimeError):
    """Machine sequences and job chains together contain a cycle."""


class OracleCapError(RehorizonError, ValueError):
    """The exact solver was asked to enumerate a subproblem above its cap."""


class InsufficientDataError(RehorizonError, ValueError):
    """Not enough labelled records to estimate a statistic."""


class ShapeError(RehorizonError, ValueError):
    """Feature matrices do not match the model's variant dimensions."""


class VerificationError(RehorizonError):
    """A produced schedule failed its feasibility check."""
