"""Exception hierarchy shared by all modules."""


class EvtrackError(Exception):
    """Base class for library errors."""


class ValidationError(EvtrackError, ValueError):
    """Malformed input: labels, masses, matrices, configs."""


class FrameMismatchError(ValidationError):
    """Operands defined over different frames."""


class CapacityError(EvtrackError):
    """Requested structure exceeds the supported enumeration size."""


class SequencingError(EvtrackError):
    """Declarations fed to a tracker out of scan order."""


class TotalConflictError(EvtrackError, ArithmeticError):
    """Dempster normalization undefined because the sources fully conflict."""

    def __init__(self, conflict: float, step: int | None = None):
        self.conflict = conflict
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"total conflict k12={conflict!r}{where}")

    def at_step(self, step: int) -> "TotalConflictError":
        return TotalConflictError(self.conflict, step)
