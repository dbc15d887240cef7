from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field
from typing import Callable
from typing import List
from typing import Optional

import numpy as np
from loguru import logger

from warpflow.counterflow.charts import slice_distance_gradient
from warpflow.counterflow.curvature import generated_mean_curvature
from warpflow.counterflow.curve import ProfileCurve
from warpflow.utils.exceptions import PinchError
from warpflow.utils.exceptions import SelfIntersectionError

DEFAULT_CFL = 0.4
DEFAULT_PINCH_RADIUS = 0.05
FAILURE_THRESHOLD = 1e3
AXIS_FRACTION = 0.5
# steps shorter than this fraction of the horizon mean nodes are being driven into the axis
MIN_STEP_FRACTION = 1e-9


@dataclass(frozen=True)
class GraphMeasures:
    """Per-node gradient functions of the two graph notions, +inf where transversality is lost."""

    v_eq: np.ndarray
    v_geo: np.ndarray
    eq_product: np.ndarray
    geo_product: np.ndarray


def _inverse_or_inf(product: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(product > 0, 1.0 / np.where(product > 0, product, 1.0), np.inf)


def graph_measures(curve: ProfileCurve) -> GraphMeasures:
    """
    v_eq = 1 / <N, (1/cosh r) d_u>_q and v_geo = 1 / <N, grad l>_q with N the q-unit left normal.
    In the isothermal chart N has chart components N^r = nu_e^w and N^u = nu_e^u / cosh r.
    """
    _, normal = generated_mean_curvature(curve)
    r, u = curve.r, curve.u
    n_r = normal[:, 0]
    n_u = normal[:, 1] / np.cosh(r)
    eq_product = np.cosh(r) * n_u
    dl_r, dl_u = slice_distance_gradient(r, u)
    geo_product = n_r * dl_r + n_u * dl_u
    return GraphMeasures(
        v_eq=_inverse_or_inf(eq_product),
        v_geo=_inverse_or_inf(geo_product),
        eq_product=eq_product,
        geo_product=geo_product,
    )


def cfl_time_step(
    curve: ProfileCurve, fraction: float = DEFAULT_CFL, axis_fraction: float = AXIS_FRACTION
) -> float:
    """
    dt = c min(ds_q)^2 / (2n), capped so that no interior node moving toward the axis covers
    more than axis_fraction of its radius r_i in one step.
    """
    dt = fraction * float(np.min(curve.segment_lengths())) ** 2 / (2 * curve.n)
    H, normal = generated_mean_curvature(curve)
    radial = (H * normal[:, 0])[1:-1]
    inward = radial < 0
    if np.any(inward):
        dt = min(dt, axis_fraction * float(np.min(curve.r[1:-1][inward] / -radial[inward])))
    return dt


def step_profile(curve: ProfileCurve, dt: float, pinch_radius: float = 0.0) -> ProfileCurve:
    """
    Move every node by dt H_gen nu in the metric q, then re-parametrize when the spacing leaves
    its bounds. Axis nodes slide along the axis; off-axis endpoints stay put.
    """
    H, normal = generated_mean_curvature(curve)
    r = curve.r + dt * H * normal[:, 0]
    u = curve.u + dt * H * normal[:, 1] / np.cosh(curve.r)
    first_axis, last_axis = curve.on_axis
    r[0] = 0.0 if first_axis else curve.r[0]
    r[-1] = 0.0 if last_axis else curve.r[-1]
    if not first_axis:
        u[0] = curve.u[0]
    if not last_axis:
        u[-1] = curve.u[-1]

    t = curve.t + dt
    if not np.all(np.isfinite(r)) or not np.all(np.isfinite(u)):
        raise PinchError(t, "profile curve left the finite range", curve=curve)
    if np.any(r[1:-1] <= 0.0):
        raise PinchError(t, "profile curve crossed the axis", curve=curve)
    if pinch_radius > 0 and float(np.max(r)) < pinch_radius:
        raise PinchError(t, f"profile curve shrank below r={pinch_radius}", curve=curve)

    moved = curve.evolve(r, u, t)
    if not moved.spacing_ok():
        moved = moved.resampled()
    if moved.self_intersects():
        raise SelfIntersectionError(t, curve=moved)
    return moved


@dataclass(frozen=True)
class ProfileSample:
    t: float
    curve: ProfileCurve
    sup_v_eq: float
    sup_v_geo: float
    min_eq_product: float
    min_geo_product: float


@dataclass
class ProfileTrajectory:
    samples: List[ProfileSample] = field(default_factory=list)
    steps: int = 0
    status: str = "running"
    failure: Optional[dict] = None

    @property
    def final(self) -> ProfileSample:
        return self.samples[-1]


def sample_profile(curve: ProfileCurve) -> ProfileSample:
    m = graph_measures(curve)
    return ProfileSample(
        t=curve.t,
        curve=curve,
        sup_v_eq=float(np.max(m.v_eq)),
        sup_v_geo=float(np.max(m.v_geo)),
        min_eq_product=float(np.min(m.eq_product)),
        min_geo_product=float(np.min(m.geo_product)),
    )


def run_profile(
    curve: ProfileCurve,
    horizon: float,
    cadence: Optional[float] = None,
    cfl: float = DEFAULT_CFL,
    pinch_radius: float = DEFAULT_PINCH_RADIUS,
    on_sample: Optional[Callable[[ProfileSample], None]] = None,
) -> ProfileTrajectory:
    """
    Flow the profile to the horizon, sampling at multiples of the cadence. A pinch or
    self-intersection ends the run; the trajectory up to the event is kept on the error.
    """
    cadence = cadence or horizon / 50
    traj = ProfileTrajectory()
    eps = 1e-12 * horizon
    logger.info(f"Running profile flow of {len(curve)} nodes to T={horizon}")

    def record(c: ProfileCurve):
        sample = sample_profile(c)
        traj.samples.append(sample)
        if on_sample is not None:
            on_sample(sample)

    record(curve)
    k = 1
    try:
        while curve.t < horizon - eps:
            target = min(k * cadence, horizon)
            dt = cfl_time_step(curve, cfl)
            if dt < MIN_STEP_FRACTION * horizon:
                raise PinchError(curve.t, "time step collapsed near the axis", curve=curve)
            hit = curve.t + dt >= target - eps
            if hit:
                dt = target - curve.t
            curve = step_profile(curve, dt, pinch_radius)
            traj.steps += 1
            if hit:
                curve = curve.evolve(curve.r, curve.u, target)
                record(curve)
                k += 1
    except (PinchError, SelfIntersectionError) as err:
        traj.status = "pinch" if isinstance(err, PinchError) else "self-intersection"
        traj.failure = {"t": err.t, "message": str(err)}
        err.trajectory = traj
        logger.warning(f"Profile flow stopped: {err}")
        raise
    traj.status = "completed"
    logger.info(f"Profile flow completed after {traj.steps} steps")
    return traj
