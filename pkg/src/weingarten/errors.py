"""Exception hierarchy. Every error carries the CLI exit code it maps to."""


class WeingartenError(Exception):
    exit_code = 1


class BadInput(WeingartenError, ValueError):
    exit_code = 5


class DomainError(BadInput):
    """Argument of phi outside [-1, 1]."""


class DegenerateParams(BadInput):
    """Coefficients that do not define the equation (e.g. a = b = 0)."""


class TooFewNodes(BadInput):
    pass


class NotParabolic(BadInput):
    pass


class ZeroB(BadInput):
    pass


class EmptyDomain(BadInput):
    pass


class NotDirichlet(BadInput):
    pass


class GridTooCoarse(BadInput):
    pass


class DegenerateProfile(BadInput):
    pass


class NoSolution(WeingartenError):
    """Hyperbolic at the axis: 2a x + b x^2 = phi(1) has no real root."""

    exit_code = 2


class DegenerateParabolic(WeingartenError):
    """The coefficient of u'' vanishes along the solution.

    ``r_star`` is the radius of breakdown; ``partial`` holds the solution
    computed up to the last regular node, when available.
    """

    exit_code = 3

    def __init__(self, message, r_star=None, partial=None):
        super().__init__(message)
        self.r_star = r_star
        self.partial = partial


class RadicandNegative(WeingartenError):
    exit_code = 3

    def __init__(self, message, r_star=None):
        super().__init__(message)
        self.r_star = r_star


class NonConvergence(WeingartenError):
    exit_code = 4

    def __init__(self, message, iterations=None, increment=None):
        super().__init__(message)
        self.iterations = iterations
        self.increment = increment


class SlopeBlowup(WeingartenError):
    """|f(u')| reached 1: the profile turns vertical inside the interval."""

    exit_code = 4


class StoppedVertical(WeingartenError):
    exit_code = 4

    def __init__(self, message, r_stop=None, partial=None):
        super().__init__(message)
        self.r_stop = r_stop
        self.partial = partial
