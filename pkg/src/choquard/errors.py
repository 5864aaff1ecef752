"""Exception types shared across the solver."""


class ChoquardError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ChoquardError):
    """Dimension or domain mismatch between a potential and its argument."""


class SingularPoint(ChoquardError):
    """Pointwise evaluation requested at the singularity of a kernel."""


class NegativeLambda(ChoquardError):
    """Relaxation level must be nonnegative."""


class BadExponent(ChoquardError):
    """Lebesgue exponent outside the admissible range."""


class GridMismatch(ChoquardError):
    """Operands live on different grids."""


class ZeroField(ChoquardError):
    """Operation undefined for the identically zero field."""


class BadRadius(ChoquardError):
    """Ball radius outside (0, L)."""


class LineSearchFailed(ChoquardError):
    """No admissible step found; signals a critical point or step floor."""


class NonpositiveObjective(ChoquardError):
    """Final objective is not positive at this discretization."""


class StageDiverged(ChoquardError):
    """Objective became non-finite; discretization breakdown."""


class DidNotConverge(ChoquardError):
    """Iteration budget exhausted before the stopping rule fired.

    Carries the best state reached so far in ``state``.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class ScheduleExhausted(ChoquardError):
    """Relaxation schedule ran out before the limit criteria were met.

    Carries the partial run data in ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class AssumptionFailure(ChoquardError):
    """Potential failed one or more structural assumption checks.

    ``failed`` lists the names of the failed conditions.
    """

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = list(failed)


class BadBracket(ChoquardError):
    """Shooting bracket endpoints do not classify as (undershoot, overshoot)."""


class UnsupportedProblem(ChoquardError):
    """No radial reduction is available for the requested problem."""


class DegenerateDenominator(ChoquardError):
    """Least-squares denominator vanished."""


class MarginViolation(ChoquardError):
    """Fields are not contained in the box with the required margin."""


class InfiniteModulus(ChoquardError):
    """Coarse-continuity modulus is not finite."""


class NonpositiveA(ChoquardError):
    """Scaling from maximizer to solution requires a positive level."""


class VersionMismatch(ChoquardError):
    """Serialized blob written by an incompatible format version."""


class CorruptFile(ChoquardError):
    """Serialized blob is truncated or carries a wrong magic."""


class ConfigError(ChoquardError):
    """Run configuration invalid; names the offending key.

    ``key`` holds the dotted path of the bad entry.
    """

    def __init__(self, message, key=""):
        super().__init__(message)
        self.key = key
