"""Exception hierarchy shared by all modules."""


class GaloisSatError(Exception):
    """Base class for every error raised by this package."""


class InvalidModulus(GaloisSatError, ValueError):
    pass


class Divergent(GaloisSatError, ValueError):
    pass


class PoleProximity(GaloisSatError, ValueError):
    pass


class UnsupportedParams(GaloisSatError, ValueError):
    pass


class CoordinateSingularity(GaloisSatError, ValueError):
    pass


class ClusteredRoots(GaloisSatError, ValueError):
    pass


class NonIntegerExponentGap(GaloisSatError, ValueError):
    pass


class NotFuchsian(GaloisSatError, ValueError):
    pass


class ClearanceViolation(GaloisSatError, ValueError):
    pass


class EnergyInfeasible(GaloisSatError, ValueError):
    pass


class StepFailure(GaloisSatError, RuntimeError):
    """Adaptive integration could not proceed (step size underflow)."""


class EscapeDetected(GaloisSatError, RuntimeError):
    """A Poincare seed left the bounded region |p1| <= escape radius."""
