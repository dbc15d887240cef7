from __future__ import annotations

from functools import wraps
from typing import List
from typing import Optional
from typing import Tuple

from loguru import logger


class WarpflowError(Exception):
    """Base class of all errors raised by warpflow."""


class InvalidWarpFactorError(WarpflowError, ValueError):
    def __init__(self, value: float, node: Optional[Tuple[int, ...]] = None):
        self.value = value
        self.node = node
        super().__init__(f"Warp factor must be positive, got phi={value} at node {node}")


class PoleExclusionError(WarpflowError, ValueError):
    def __init__(self, r: float):
        self.r = r
        super().__init__(f"Chart point r={r} is the pole of a polar chart; the frame is undefined")


class BoundaryPolicyError(WarpflowError, ValueError):
    pass


class IncompatibleCatalogError(WarpflowError, ValueError):
    pass


class BlowUpError(WarpflowError, RuntimeError):
    """Raised when the graph leaves the graph regime: non-finite height or v > threshold."""

    def __init__(self, node: Tuple[int, ...], t: float, value: float, trajectory=None):
        self.node = node
        self.t = t
        self.value = value
        self.trajectory = trajectory
        super().__init__(f"Blow-up at node {node}, t={t:.6g} (value={value})")


class PreconditionError(WarpflowError, ValueError):
    def __init__(self, message: str, plane: Optional[str] = None, value: Optional[float] = None):
        self.plane = plane
        self.value = value
        super().__init__(message)


class IllConditionedMetricError(WarpflowError, ValueError):
    def __init__(self, condition_number: float):
        self.condition_number = condition_number
        super().__init__(f"Metric condition number {condition_number:.3e} exceeds 1e8")


class OracleSelfTestError(WarpflowError, ArithmeticError):
    """The finite-difference curvature tensor fails its own algebraic symmetries."""


class ConfigIssue:
    def __init__(self, path: str, message: str, hint: Optional[str] = None):
        self.path = path
        self.message = message
        self.hint = hint

    def __repr__(self):
        hint = f" (hint: {self.hint})" if self.hint else ""
        return f"{self.path}: {self.message}{hint}"

    def to_dict(self):
        return {"path": self.path, "message": self.message, "hint": self.hint}


class ConfigError(WarpflowError, ValueError):
    def __init__(self, issues: List[ConfigIssue]):
        self.issues = list(issues)
        lines = "\n".join(f"  - {issue}" for issue in self.issues)
        super().__init__(f"{len(self.issues)} configuration issue(s):\n{lines}")

    @property
    def paths(self) -> List[str]:
        return [issue.path for issue in self.issues]


class SnapshotError(WarpflowError, IOError):
    pass


class SnapshotVersionError(SnapshotError):
    pass


class CorruptSnapshotError(SnapshotError):
    pass


class InvalidAxisError(WarpflowError, ValueError):
    pass


class PinchError(WarpflowError, RuntimeError):
    def __init__(self, t: float, message: str = "profile curve pinched on the axis", curve=None):
        self.t = t
        self.curve = curve
        super().__init__(f"{message} at t={t:.6g}")


class SelfIntersectionError(WarpflowError, RuntimeError):
    def __init__(self, t: float, curve=None):
        self.t = t
        self.curve = curve
        super().__init__(f"profile curve self-intersects at t={t:.6g}")


def catch_exception_as_warning(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:
            logger.exception(exc)

    return wrapper
