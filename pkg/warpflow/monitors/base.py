from __future__ import annotations

import abc
from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple

from loguru import logger

from warpflow.geometry.constants import EstimateConstants
from warpflow.graphflow.flow import Trajectory
from warpflow.utils.exceptions import PreconditionError
from warpflow.utils.functional import to_jsonable
from warpflow.utils.reporting import JsonReporter

# classification of a violation beyond the discretization tolerance
DISCRETIZATION = "discretization"
GENUINE = "genuine"
DIAGNOSTIC = "diagnostic"
BREACH = "breach"


@dataclass(frozen=True)
class BoundRecord:
    t: float
    measured: float
    bound: float
    node: Optional[Tuple[int, ...]] = None

    @property
    def margin(self) -> float:
        return self.bound - self.measured

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "measured": self.measured,
            "bound": self.bound,
            "margin": self.margin,
            "node": list(self.node) if self.node is not None else None,
        }


@dataclass
class Violation:
    t: float
    node: Optional[Tuple[int, ...]]
    margin: float
    classification: Optional[str] = None

    @property
    def excess(self) -> float:
        return -self.margin

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "node": list(self.node) if self.node is not None else None,
            "margin": self.margin,
            "classification": self.classification or "unclassified",
        }


@dataclass
class BoundReport:
    """
    Measured values, theoretical bounds and margins of one bound along a trajectory.

    Margins are kept as computed, negative ones included. A record whose margin falls below
    `-tolerance` is a violation; the worst one is kept in `violation` until it is classified
    by a refinement study.
    """

    bound_id: str
    records: List[BoundRecord] = field(default_factory=list)
    constants: Optional[Dict[str, Any]] = None
    tolerance: float = 0.0
    strict: bool = True
    violation: Optional[Violation] = None
    failure: Optional[Dict[str, Any]] = None
    error: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def append(self, record: BoundRecord) -> None:
        self.records.append(record)

    def finalize(self) -> "BoundReport":
        """Locate the worst violation beyond the tolerance."""
        worst = min(self.records, key=lambda r: r.margin, default=None)
        if worst is not None and not worst.margin >= -self.tolerance:
            self.violation = Violation(
                t=worst.t,
                node=worst.node,
                margin=worst.margin,
                classification=None if self.strict else DIAGNOSTIC,
            )
        return self

    @property
    def min_margin(self) -> float:
        return min((r.margin for r in self.records), default=float("inf"))

    @property
    def is_genuine(self) -> bool:
        if self.violation is None:
            return False
        return self.violation.classification in (None, GENUINE, BREACH)

    @property
    def passed(self) -> bool:
        return self.error is None and not self.is_genuine

    def rows(self) -> List[Tuple[float, float, float, float]]:
        return [(r.t, r.measured, r.bound, r.margin) for r in self.records]

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable(
            {
                "bound": self.bound_id,
                "passed": self.passed,
                "mode": "strict" if self.strict else "one-sided",
                "tolerance": self.tolerance,
                "min_margin": self.min_margin,
                "violation": self.violation.to_dict() if self.violation else None,
                "failure": self.failure,
                "error": self.error,
                "details": self.details,
                "constants": self.constants,
                "records": [r.to_dict() for r in self.records],
            }
        )


def discretization_tolerance(traj: Trajectory, constant: float = 1.0) -> float:
    """tol_disc = C (h^2 + dt) on the trajectory's grid and time step."""
    return constant * (traj.grid.h_min**2 + traj.dt)


def classify_violation(coarse: float, fine: float, ratio: float = 2.0, order: float = 1.0) -> str:
    """
    A violation that shrinks at least at the given order when h is divided by `ratio` is
    attributed to the discretization; anything else is genuine.
    """
    coarse, fine = max(coarse, 0.0), max(fine, 0.0)
    if fine == 0.0:
        return DISCRETIZATION
    if coarse == 0.0:
        return GENUINE
    return DISCRETIZATION if coarse / fine >= ratio**order else GENUINE


class Monitor(JsonReporter):
    """
    A Monitor evaluates one bound along a trajectory and reports the result.

    Attributes
    ----------
    bound_id
        Name of the bound, used for the report and its output files.
    """

    bound_id: str = "bound"
    summary_exclude = ["records", "constants"]

    def __init__(self, *, tolerance_constant: float = 1.0, **kwargs):
        super().__init__(**kwargs)
        self.tolerance_constant = tolerance_constant

    @property
    def output_file_name(self) -> str:
        return f"{self.bound_id}.json"

    def __call__(
        self, traj: Trajectory, constants: Optional[EstimateConstants] = None
    ) -> BoundReport:
        """Evaluate the bound along `traj`, then save and print the report."""
        logger.info(f"Running {type(self).__name__} on {len(traj)} samples")
        tolerance = discretization_tolerance(traj, self.tolerance_constant)
        try:
            report = self.evaluate(traj, constants, tolerance=tolerance)
        except PreconditionError as err:
            return self.reject(err, constants, tolerance)
        self._process_results(report.to_dict())
        return report

    def check_preconditions(self, state) -> None:
        """Raise PreconditionError when the bound cannot apply to flows started at `state`."""

    def reject(
        self,
        err: PreconditionError,
        constants: Optional[EstimateConstants] = None,
        tolerance: float = 0.0,
    ) -> BoundReport:
        """Save and return the error report of an unmet precondition."""
        logger.error(f"{type(self).__name__}: {err}")
        report = BoundReport(
            bound_id=self.bound_id,
            constants=constants.to_dict() if constants is not None else None,
            tolerance=tolerance,
            error=str(err),
            details={"plane": err.plane, "value": err.value},
        )
        self._process_results(report.to_dict())
        return report

    @abc.abstractmethod
    def evaluate(
        self, traj: Trajectory, constants: Optional[EstimateConstants], *, tolerance: float
    ) -> BoundReport:
        raise NotImplementedError
