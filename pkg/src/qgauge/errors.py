"""Exception hierarchy shared by every qgauge module."""


class QGaugeError(Exception):
    """Base class for all qgauge errors."""


# core
class WeightError(QGaugeError, ValueError):
    pass


class EmptyWeights(WeightError):
    pass


class NonPositiveWeight(WeightError):
    pass


class NotCoprime(WeightError):
    pass


class DimensionMismatch(QGaugeError, ValueError):
    pass


class InvalidPoint(QGaugeError, ValueError):
    pass


# calculus
class EvaluationError(QGaugeError, ArithmeticError):
    """The function is undefined (or not differentiable) at the requested point."""


class NonSmoothPoint(EvaluationError):
    """A jet was requested where the function has no derivative (e.g. a max-kink)."""


class OrderTooLow(QGaugeError, ValueError):
    pass


class NotHermitian(QGaugeError, ValueError):
    pass


class ZeroGradient(QGaugeError, ArithmeticError):
    pass


# gauge
class InvalidDomain(QGaugeError, ValueError):
    pass


class ZeroPoint(QGaugeError, ValueError):
    pass


class BracketFailure(QGaugeError, ArithmeticError):
    pass


class MaxIterations(QGaugeError, ArithmeticError):
    pass


class DegenerateRadialDerivative(QGaugeError, ArithmeticError):
    pass


# verify
class SamplingFailure(QGaugeError, RuntimeError):
    pass


# domains
class UnknownFamily(QGaugeError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class BadParameters(QGaugeError, ValueError):
    pass


class NoOracle(QGaugeError, LookupError):
    pass


# cli
class ConfigError(QGaugeError, ValueError):
    def __init__(self, field, reason):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}" if field else reason)
