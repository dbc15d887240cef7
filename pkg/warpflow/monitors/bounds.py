"""
Bounds monitored along a graph flow. Every check takes the maximum over grid nodes in place of
the supremum over the base and compares it with the closed-form bound at each sample time.
"""
from __future__ import annotations

import math
from typing import Optional
from typing import Tuple

import numpy as np
from loguru import logger

from warpflow.geometry.ambient import sectional_maximum
from warpflow.geometry.comparison import comparison_fn
from warpflow.geometry.constants import EstimateConstants
from warpflow.geometry.distance import distance_to_slice
from warpflow.graphflow.flow import BLOWUP_THRESHOLD
from warpflow.graphflow.flow import Trajectory
from warpflow.graphflow.flow import TrajectorySample
from warpflow.monitors.base import BoundRecord
from warpflow.monitors.base import BoundReport
from warpflow.monitors.base import BREACH
from warpflow.monitors.base import GENUINE
from warpflow.monitors.base import Monitor
from warpflow.monitors.base import Violation
from warpflow.oracle.induced import InducedChart
from warpflow.utils.exceptions import PreconditionError


def _node_max(values: np.ndarray) -> Tuple[float, Tuple[int, ...]]:
    node = np.unravel_index(int(np.argmax(values)), values.shape)
    return float(values[node]), tuple(int(i) for i in node)


def _constants_dict(constants: Optional[EstimateConstants]):
    return constants.to_dict() if constants is not None else None


def gradient_bound_check(
    traj: Trajectory, constants: EstimateConstants, tolerance: float = 0.0
) -> BoundReport:
    """
    sup v(t) against v0_max e^{(n-1) nu t} on compact bases and against
    v0_max e^{(2 eta^2 + (n-1) eps_nu) t} on non-compact ones.
    """
    if not len(traj):
        raise ValueError("the trajectory has no samples")
    report = BoundReport(
        bound_id="gradient_bound", constants=constants.to_dict(), tolerance=tolerance
    )
    for sample in traj.samples:
        measured, node = _node_max(sample.fields.v)
        report.append(BoundRecord(sample.t, measured, constants.gradient_bound(sample.t), node))
    report.details = {"exponent": constants.gradient_growth_exponent()}
    return report.finalize()


def frakg(sample: TrajectorySample, constants: EstimateConstants) -> np.ndarray:
    """psi(v)|A|^2 with psi(v) = v^2 / (1 - delta v^2)."""
    return constants.psi(sample.fields.v) * sample.fields.A_norm2


def frakg_bound_check(
    traj: Trajectory, constants: EstimateConstants, tolerance: float = 0.0
) -> BoundReport:
    """
    Running maximum of psi(v)|A|^2 against max{max g_0, (K + C)/(2 delta), 1}. Where
    delta v^2 >= 1 the weight psi is undefined: the report records the gradient-bound breach
    and stops there.
    """
    report = BoundReport(
        bound_id="frakg_bound", constants=constants.to_dict(), tolerance=tolerance
    )
    running = -math.inf
    ceiling = None
    for sample in traj.samples:
        dv2 = constants.delta * sample.fields.v**2
        if np.any(dv2 >= 1.0):
            value, node = _node_max(dv2)
            logger.warning(f"delta v^2 = {value:.4g} >= 1 at node {node}, t={sample.t:.4g}")
            report.failure = {"t": sample.t, "node": list(node), "delta_v2": value}
            report.violation = Violation(sample.t, node, -math.inf, classification=BREACH)
            break
        measured, node = _node_max(frakg(sample, constants))
        if ceiling is None:
            ceiling = constants.frakg_ceiling(measured)
        running = max(running, measured)
        report.append(BoundRecord(sample.t, running, ceiling, node))
    report.details = {
        "ceiling": ceiling,
        "stationary_value": (constants.K + constants.C) / (2 * constants.delta),
    }
    if report.violation is None:
        report.finalize()
    return report


def _chart_second_fundamental_form(sample: TrajectorySample) -> np.ndarray:
    """A(d_a, d_b) from the frame components A_ij."""
    state = sample.state
    frame = state.base.frame(*state.grid.coordinates())
    n = frame.shape[0]
    moved = np.moveaxis(frame.reshape(n, n, -1), -1, 0)
    inverse = np.moveaxis(np.linalg.inv(moved), 0, -1).reshape(frame.shape)
    return np.einsum("ai...,bj...,ij...->ab...", inverse, inverse, sample.fields.A)


def covariant_derivative_norm2(sample: TrajectorySample) -> np.ndarray:
    """|nabla A|^2 in the induced metric, nabla_c A_ab = d_c A_ab - G^d_ca A_db - G^d_cb A_ad."""
    chart = InducedChart.of(sample.state)
    a = _chart_second_fundamental_form(sample)
    n = a.shape[0]
    da = np.stack([np.stack([chart.partials(a[i, j]) for j in range(n)]) for i in range(n)])
    da = np.einsum("abc...->cab...", da)
    gamma = chart.christoffel
    nabla = (
        da
        - np.einsum("dca...,db...->cab...", gamma, a)
        - np.einsum("dcb...,ad...->cab...", gamma, a)
    )
    g = chart.inverse
    return np.einsum("cf...,ad...,be...,cab...,fde...->...", g, g, g, nabla, nabla)


def regularization_check(
    traj: Trajectory,
    constants: Optional[EstimateConstants] = None,
    tolerance: float = 0.0,
    order: int = 0,
) -> BoundReport:
    """
    sup (t/(1+t))^{m+1} |nabla^m A|^2 over the sample times, for m = 0 or 1. The bound exists
    when this stays finite as t -> 0; for m = 0 the constant alpha_0 is the reference bound.
    """
    if order not in (0, 1):
        raise ValueError(f"derivative order must be 0 or 1, got {order}")
    if traj.initial.t != 0.0:
        logger.warning(f"Regularization is measured from t={traj.initial.t}, not from t=0")
    alpha = constants.alpha0 if constants is not None and order == 0 else math.inf
    report = BoundReport(
        bound_id=f"regularization_m{order}",
        constants=_constants_dict(constants),
        tolerance=tolerance,
    )
    running = 0.0
    for sample in traj.samples:
        t = sample.t
        norm2 = sample.fields.A_norm2 if order == 0 else covariant_derivative_norm2(sample)
        sup, node = _node_max(norm2)
        measured = (t / (1.0 + t)) ** (order + 1) * sup
        running = max(running, measured)
        report.append(BoundRecord(t, measured, alpha, node))
    report.details = {"order": order, "running_max": running, "finite": math.isfinite(running)}
    report.finalize()
    if not math.isfinite(running) and report.violation is None:
        worst = report.records[-1]
        report.violation = Violation(worst.t, worst.node, -math.inf, classification=GENUINE)
    return report


def decay_preconditions(state, k: float) -> float:
    """
    Raise PreconditionError unless k < 0 bounds the ambient sectional curvature of `state`.
    Returns the sectional maximum.
    """
    if not k < 0:
        raise PreconditionError(f"the decay bound needs a curvature ceiling k < 0, got {k}")
    sec_max, plane = sectional_maximum(state.base, state.warp, state.grid)
    if sec_max > k + 1e-9:
        raise PreconditionError(
            f"ambient sectional curvature {sec_max:.6g} in plane {plane} exceeds k={k}",
            plane=plane,
            value=sec_max,
        )
    return sec_max


def decay_check(
    traj: Trajectory,
    k: float,
    ell0: Optional[float] = None,
    constants: Optional[EstimateConstants] = None,
    tolerance: float = 0.0,
) -> BoundReport:
    """
    sup s_k(l(x, t)) against s_k(l_0) e^{knt}, l the distance to the slice u = 0.

    Requires the ambient sectional curvature to be at most k < 0 on the grid. Without a closed
    form for l the vertical length phi|u| stands in as an upper bound; the check is then a
    one-sided diagnostic whose violations are never genuine.
    """
    initial = traj.initial.state
    sec_max = decay_preconditions(initial, k)
    base, warp, grid = initial.base, initial.warp, initial.grid
    coords = grid.coordinates()
    n = base.dimension

    def s_k(ell):
        return comparison_fn(k, ell)[0]

    distances = [distance_to_slice(base, warp, coords, s.state.u) for s in traj.samples]
    exact = all(e for _, e in distances)
    if ell0 is None:
        ell0 = float(np.max(distances[0][0]))
    report = BoundReport(
        bound_id="decay",
        constants=_constants_dict(constants),
        tolerance=tolerance,
        strict=exact,
    )
    for sample, (ell, _) in zip(traj.samples, distances):
        measured, node = _node_max(s_k(ell))
        bound = s_k(ell0) * math.exp(k * n * sample.t)
        report.append(BoundRecord(sample.t, measured, bound, node))
    report.details = {"k": k, "ell0": ell0, "exact_distance": exact, "sectional_max": sec_max}
    return report.finalize()


def graph_property_check(traj: Trajectory, tolerance: float = 0.0) -> BoundReport:
    """v finite at every node and sample; a run that ended in blow-up carries its failure."""
    report = BoundReport(bound_id="graph_property", tolerance=tolerance)
    for sample in traj.samples:
        v = np.where(np.isfinite(sample.fields.v), sample.fields.v, np.inf)
        measured, node = _node_max(v)
        report.append(BoundRecord(sample.t, measured, BLOWUP_THRESHOLD, node))
    report.finalize()
    if traj.failure is not None:
        report.failure = dict(traj.failure)
        report.violation = Violation(
            t=traj.failure["t"],
            node=tuple(traj.failure["node"]),
            margin=-math.inf,
            classification=GENUINE,
        )
    report.details = {"status": traj.status, "sup_v": [r.measured for r in report.records]}
    return report


class GradientBound(Monitor):
    bound_id = "gradient_bound"

    def evaluate(self, traj, constants, *, tolerance):
        return gradient_bound_check(traj, constants, tolerance=tolerance)


class FrakgBound(Monitor):
    bound_id = "frakg_bound"

    def evaluate(self, traj, constants, *, tolerance):
        return frakg_bound_check(traj, constants, tolerance=tolerance)


class Regularization(Monitor):
    def __init__(self, *, order: int = 0, **kwargs):
        self.order = order
        super().__init__(**kwargs)

    @property
    def bound_id(self) -> str:
        return f"regularization_m{self.order}"

    def evaluate(self, traj, constants, *, tolerance):
        return regularization_check(traj, constants, tolerance=tolerance, order=self.order)


class Decay(Monitor):
    bound_id = "decay"

    def __init__(self, *, k: float = -1.0, ell0: Optional[float] = None, **kwargs):
        self.k = k
        self.ell0 = ell0
        super().__init__(**kwargs)

    def check_preconditions(self, state) -> None:
        decay_preconditions(state, self.k)

    def evaluate(self, traj, constants, *, tolerance):
        return decay_check(traj, self.k, self.ell0, constants=constants, tolerance=tolerance)


class GraphProperty(Monitor):
    bound_id = "graph_property"

    def evaluate(self, traj, constants, *, tolerance):
        return graph_property_check(traj, tolerance=tolerance)
