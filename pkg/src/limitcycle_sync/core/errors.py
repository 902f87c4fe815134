"""Exception hierarchy shared by every engine."""

from __future__ import annotations


class SyncError(Exception):
    """Base class; ``operation`` names the public operation that failed."""

    def __init__(self, message: str, operation: str = ""):
        super().__init__(message)
        self.operation = operation


class InvalidParameters(SyncError):
    pass


class OutOfRange(SyncError):
    pass


class InvalidModel(SyncError):
    pass


class NotPSD(SyncError):
    pass


class NoLimitCycle(SyncError):
    pass


class SolverDiverged(SyncError):
    pass


class StepTooLarge(SyncError):
    pass


class SingularFriction(SyncError):
    pass


class InsufficientLength(SyncError):
    pass


class InsufficientData(SyncError):
    pass


class NotConverged(SyncError):
    pass


class SingularSystem(SyncError):
    pass


class CutoffTooSmall(SyncError):
    pass


class CutoffDominated(SyncError):
    pass


class ConfigError(SyncError):
    """Configuration parse/validation failure with a dotted field path."""

    def __init__(self, message: str, field: str = "", line: int | None = None):
        super().__init__(message, operation="load_config")
        self.field = field
        self.line = line

    def __str__(self) -> str:
        where = self.field or "<root>"
        if self.line is not None:
            where += f" (line {self.line})"
        return f"{where}: {self.args[0]}"
