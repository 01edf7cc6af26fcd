class StpgError(Exception):
    """Base class for all errors raised by this package."""


class SettleNonSwitchable(StpgError):
    pass


class CycleEncountered(StpgError):
    pass


class DeadlockDetected(StpgError):
    pass


class UnreachableGoal(StpgError):
    pass


class MalformedPlan(StpgError):
    pass


class PlanConflict(StpgError):
    """Raised when a plan with vertex or following conflicts is turned into a TPG."""

    def __init__(self, conflicts):
        self.conflicts = list(conflicts)
        super().__init__(f"{len(self.conflicts)} conflict(s), first: {self.conflicts[0]}")


class DelayIndexOutOfRange(StpgError, IndexError):
    pass


class InfeasibleInput(StpgError):
    pass


class TooLarge(StpgError):
    pass


class GroupsFileError(StpgError):
    pass
