"""Exception types raised across the package."""


class MaxshapeError(Exception):
    """Base class for every error raised by maxshape."""


class EmptySet(MaxshapeError):
    pass


class InvalidNetwork(MaxshapeError):
    pass


class InvalidDomain(MaxshapeError):
    pass


class DisconnectedResult(MaxshapeError):
    pass


class TargetTooSmall(MaxshapeError):
    pass


class NoRoom(MaxshapeError):
    """A complementary component is below grid resolution."""


class GridTooLarge(MaxshapeError):
    pass


class SolverDiverged(MaxshapeError):
    pass


class NotEnoughModes(MaxshapeError):
    pass


class BadExponents(MaxshapeError):
    pass


class NoConvergence(MaxshapeError):
    pass


class NotNested(MaxshapeError):
    pass


class Overlap(MaxshapeError):
    pass


class NotConverging(MaxshapeError):
    pass


class InfeasibleLength(MaxshapeError):
    pass


class MoveInapplicable(MaxshapeError):
    pass


class RepairFailed(MaxshapeError):
    pass


class ConfigError(MaxshapeError):
    pass
