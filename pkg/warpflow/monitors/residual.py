from __future__ import annotations

from typing import Optional

from warpflow.geometry.constants import EstimateConstants
from warpflow.graphflow.flow import Trajectory
from warpflow.monitors.base import BoundRecord
from warpflow.monitors.base import BoundReport
from warpflow.monitors.base import Monitor
from warpflow.oracle.residual import v_evolution_residual

RESIDUAL_TOLERANCE = 1e-2


def v_residual_check(
    traj: Trajectory,
    constants: Optional[EstimateConstants] = None,
    tolerance: float = 0.0,
    ceiling: float = RESIDUAL_TOLERANCE,
    boundary_rings: int = 2,
) -> BoundReport:
    """Max-norm residual of the v evolution at every interior sample time against a ceiling."""
    report = BoundReport(
        bound_id="v_residual",
        constants=constants.to_dict() if constants is not None else None,
        tolerance=tolerance,
    )
    if len(traj) < 3:
        report.details = {"skipped": f"{len(traj)} samples, three are needed"}
        return report
    series = v_evolution_residual(traj, boundary_rings=boundary_rings)
    for t, value in zip(series.times, series.values):
        report.append(BoundRecord(float(t), float(value), ceiling))
    report.details = {"max": series.max}
    return report.finalize()


class VResidual(Monitor):
    bound_id = "v_residual"

    def __init__(self, *, ceiling: float = RESIDUAL_TOLERANCE, **kwargs):
        self.ceiling = ceiling
        super().__init__(**kwargs)

    def evaluate(self, traj, constants, *, tolerance):
        return v_residual_check(traj, constants, tolerance=tolerance, ceiling=self.ceiling)
