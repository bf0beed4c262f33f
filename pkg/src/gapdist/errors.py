"""Exception hierarchy shared by all gapdist modules."""


class GapdistError(Exception):
    """Base class for every error raised by gapdist."""


class NotMutuallyTangent(GapdistError):
    pass


class NotTangent(GapdistError):
    pass


class PointOffCircle(GapdistError):
    pass


class InvalidConfig(GapdistError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class InvalidPair(GapdistError):
    pass


class BudgetExceeded(GapdistError):
    pass


class TooFewPoints(GapdistError):
    pass


class GridMismatch(GapdistError):
    pass


class ArcThroughInfinity(GapdistError):
    pass


class MarginExhausted(GapdistError):
    pass


class InvalidQ(GapdistError):
    pass


class IdentityFailed(GapdistError):
    def __init__(self, which, error):
        super().__init__(f"identity {which!r} fails with projective error {error:.3e}")
        self.which = which
        self.error = error


class UpperTriangular(GapdistError):
    pass


class BallNotSaturated(GapdistError):
    pass
