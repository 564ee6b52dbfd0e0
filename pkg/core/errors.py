"""
Error types

Every failure the library can report has its own class so callers (the CLI,
the tools, the audits) can tell structured findings apart from bugs.
"""

from typing import Any, List, Optional, Sequence


class TopochoiceError(Exception):
    """Base class for all library errors"""


class DimensionMismatch(TopochoiceError, ValueError):
    pass


class NearZeroVector(TopochoiceError, ValueError):
    """Raised by normalize() when the vector is too short to be scaled"""

    def __init__(self, norm: float):
        super().__init__(f"cannot normalize vector of norm {norm:.3e} (threshold 1e-12)")
        self.norm = norm


class AntipodalPair(TopochoiceError, ValueError):
    pass


class UnsupportedDimension(TopochoiceError, ValueError):
    pass


class IndexOutOfRange(TopochoiceError, IndexError):
    pass


class BadParams(TopochoiceError, ValueError):
    pass


class BadK(TopochoiceError, ValueError):
    pass


class PreconditionViolated(TopochoiceError, ValueError):
    pass


class UndefinedAtProfile(TopochoiceError):
    """A partial rule was evaluated on its singular set

    ``stage`` names which evaluation failed when a checker evaluates two
    profiles (e.g. "abstention" / "participation").
    """

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message if stage is None else f"[{stage}] {message}")
        self.stage = stage


class UndefinedAtPoint(TopochoiceError):
    """A self-map built from a partial rule is undefined at one or more points"""

    def __init__(self, message: str, locations: Sequence[Any] = ()):
        super().__init__(message)
        self.locations: List[Any] = list(locations)


class TwinPreconditionViolated(TopochoiceError, ValueError):
    pass


class NotAntipodal(TopochoiceError, ValueError):
    pass


class RefinementExceeded(TopochoiceError):
    def __init__(self, message: str, arc: tuple):
        super().__init__(message)
        self.arc = arc


class NonIntegerTotal(TopochoiceError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class StarConditionFailed(TopochoiceError):
    pass


class TargetDisagreement(TopochoiceError):
    def __init__(self, message: str, counts: Sequence[int] = ()):
        super().__init__(message)
        self.counts = list(counts)


class IncompleteReport(TopochoiceError, ValueError):
    pass


class AntipodeSearchStalled(TopochoiceError):
    def __init__(self, message: str, best_residual: float):
        super().__init__(message)
        self.best_residual = best_residual


class AuditInvariantBroken(TopochoiceError):
    """An audit reached a state the degree-system verdict rules out"""


class ReportIoError(TopochoiceError, OSError):
    def __init__(self, message: str, path: str):
        super().__init__(f"{message} (path: {path})")
        self.path = path
