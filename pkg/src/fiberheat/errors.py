"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`FiberHeatError`
so callers (and the CLI) can separate numerical failures from programming bugs.
"""


class FiberHeatError(Exception):
    """Base class for all library errors."""


# field / geometry -----------------------------------------------------------

class FieldError(FiberHeatError):
    pass


class InvalidParameter(FieldError, ValueError):
    pass


class NullPoint(FieldError):
    """|grad psi| vanishes (or the level sets fold) somewhere in the domain."""


class DegenerateMetric(FieldError):
    """The flux-coordinate Jacobian is not strictly positive."""


class PerturbationTooLarge(FieldError):
    pass


class BoundaryViolation(FieldError):
    pass


class OutOfDomain(FieldError, ValueError):
    pass


class ZeroField(FieldError):
    pass


class WrongKind(FieldError, TypeError):
    pass


class WrongDimension(FiberHeatError, ValueError):
    pass


class GridMismatch(FiberHeatError, ValueError):
    pass


class IndexOutOfRange(FiberHeatError, IndexError):
    pass


class DegenerateGamma(FiberHeatError):
    pass


# solver -----------------------------------------------------------------------

class NumericalError(FiberHeatError):
    pass


class NonSPD(NumericalError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


# ergodic / mde ----------------------------------------------------------------

class NonMonotoneIota(FiberHeatError):
    pass


class NotSolvable(FiberHeatError):
    pass


class SmallDivisor(FiberHeatError):
    def __init__(self, mode, divisor):
        m, n = mode
        super().__init__(f"resonant mode (m, n) = ({m}, {n}): |m + iota n| = {divisor:.3e}")
        self.mode = (int(m), int(n))
        self.divisor = divisor


class NonPositiveData(FiberHeatError, ValueError):
    pass


# cli ------------------------------------------------------------------------

class ConfigError(FiberHeatError):
    def __init__(self, message, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line


class InvariantViolation(FiberHeatError):
    pass
