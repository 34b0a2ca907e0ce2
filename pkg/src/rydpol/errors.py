"""Exception hierarchy shared by all modules."""


class RydpolError(Exception):
    """Base class for every error raised by rydpol."""


class ConfigError(RydpolError):
    """Malformed or inconsistent configuration input."""


class PhysicsError(RydpolError):
    """The requested physical situation has no solution."""


class NoCrossing(PhysicsError):
    pass


class NoRoot(PhysicsError):
    pass


class Infeasible(PhysicsError):
    pass


class NonPhysical(PhysicsError):
    pass


class GainForbidden(PhysicsError):
    """Passive linear optics can only maintain or attenuate intensity."""


class ZeroPower(RydpolError):
    pass


class MissingSetting(RydpolError):
    pass


class ZeroCoincidences(RydpolError):
    pass
