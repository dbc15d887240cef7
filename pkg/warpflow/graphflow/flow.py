from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from typing import Callable
from typing import List
from typing import Optional
from typing import Union

import numpy as np
from loguru import logger

from warpflow.geometry.grid import angular_filter
from warpflow.graphflow.fields import compute_fields
from warpflow.graphflow.fields import flow_speed
from warpflow.graphflow.fields import GraphFields
from warpflow.graphflow.fields import gradient_growth_rate
from warpflow.graphflow.fields import SampledGeometry
from warpflow.graphflow.state import BoundaryPolicy
from warpflow.graphflow.state import GraphState
from warpflow.graphflow.timestep import CflTimeStep
from warpflow.graphflow.timestep import TimeStepPolicy
from warpflow.utils.exceptions import BlowUpError

BLOWUP_THRESHOLD = 1e6
DEFAULT_SAMPLES = 50


class Scheme(Enum):
    euler = "euler"
    rk2 = "rk2"


@dataclass(frozen=True)
class TrajectorySample:
    state: GraphState
    fields: GraphFields
    growth_rate: np.ndarray

    @property
    def t(self) -> float:
        return self.state.t


@dataclass
class Trajectory:
    """Append-only record of the sampled states of a flow."""

    geometry: SampledGeometry
    dt: float
    scheme: Scheme
    samples: List[TrajectorySample] = field(default_factory=list)
    steps: int = 0
    status: str = "running"
    failure: Optional[dict] = None

    def append(self, sample: TrajectorySample) -> None:
        self.samples.append(sample)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def initial(self) -> TrajectorySample:
        return self.samples[0]

    @property
    def final(self) -> TrajectorySample:
        return self.samples[-1]

    @property
    def grid(self):
        return self.samples[0].state.grid

    def __len__(self):
        return len(self.samples)


@dataclass
class FlowConfig:
    horizon: float
    cadence: Optional[float] = None
    scheme: Scheme = Scheme.euler
    dt_policy: TimeStepPolicy = field(default_factory=CflTimeStep)
    stop_tolerance: Optional[float] = None
    on_sample: Optional[Callable[[TrajectorySample], None]] = None

    def __post_init__(self):
        if self.horizon <= 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.cadence is None:
            self.cadence = self.horizon / DEFAULT_SAMPLES
        if self.cadence <= 0:
            raise ValueError(f"sample cadence must be positive, got {self.cadence}")
        self.scheme = Scheme(self.scheme)


def _first_bad_node(values: np.ndarray, bad: np.ndarray):
    return tuple(int(i) for i in np.argwhere(bad)[0])


def _check_graph(u: np.ndarray, v: Optional[np.ndarray], t: float) -> None:
    finite = np.isfinite(u)
    if not np.all(finite):
        node = _first_bad_node(u, ~finite)
        raise BlowUpError(node, t, float(u[node]))
    if v is not None:
        bad = ~np.isfinite(v) | (v > BLOWUP_THRESHOLD)
        if np.any(bad):
            node = _first_bad_node(v, bad)
            raise BlowUpError(node, t, float(v[node]))


def _advance(state: GraphState, speed: np.ndarray, dt: float, geometry: SampledGeometry):
    u = state.u + dt * speed
    if state.policy == BoundaryPolicy.dirichlet:
        u[-1, :] = state.u[-1, :]
    if geometry.cutoffs is not None:
        u = angular_filter(u, geometry.cutoffs)
    _check_graph(u, None, state.t + dt)
    return u


def step_flow(
    state: GraphState,
    dt_policy: Union[TimeStepPolicy, float],
    scheme: Union[Scheme, str] = Scheme.euler,
    geometry: Optional[SampledGeometry] = None,
) -> GraphState:
    """One explicit Euler or midpoint step of du/dt = (v/phi) H."""
    geometry = geometry or SampledGeometry.of(state)
    dt = dt_policy(state) if isinstance(dt_policy, TimeStepPolicy) else float(dt_policy)
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    speed, v = flow_speed(state, geometry)
    _check_graph(state.u, v, state.t)

    scheme = Scheme(scheme)
    if scheme == Scheme.euler:
        u = _advance(state, speed, dt, geometry)
    elif scheme == Scheme.rk2:
        half = state.evolve(_advance(state, speed, 0.5 * dt, geometry), state.t + 0.5 * dt)
        speed_half, v_half = flow_speed(half, geometry)
        _check_graph(half.u, v_half, half.t)
        u = _advance(state, speed_half, dt, geometry)
    else:
        raise ValueError(f"Unknown scheme: {scheme}")
    return state.evolve(u, state.t + dt)


def sample_state(state: GraphState, geometry: SampledGeometry) -> TrajectorySample:
    fields = compute_fields(state, geometry)
    speed, _ = flow_speed(state, geometry)
    return TrajectorySample(
        state=state,
        fields=fields,
        growth_rate=gradient_growth_rate(fields, geometry, speed),
    )


def run_flow(
    initial: GraphState, config: FlowConfig, geometry: Optional[SampledGeometry] = None
) -> Trajectory:
    """
    Integrate the flow from `initial` to the horizon, sampling at multiples of the cadence.

    Samples are taken at t = k * cadence exactly, so a run restarted from a sampled state
    takes the same steps as the uninterrupted run. A sample that fails the graph check is kept
    as the last sample of the trajectory carried by the BlowUpError.
    """
    geometry = geometry or SampledGeometry.of(initial)
    state = initial
    dt0 = config.dt_policy(state)
    traj = Trajectory(geometry=geometry, dt=dt0, scheme=config.scheme)
    horizon, cadence = config.horizon, config.cadence
    eps = 1e-12 * horizon
    logger.info(
        f"Running {config.scheme.value} flow to T={horizon} with dt={dt0:.3e}, "
        f"cadence={cadence:.3e} on grid {state.grid.shape}"
    )

    def record(s: GraphState) -> Optional[TrajectorySample]:
        sample = sample_state(s, geometry)
        traj.append(sample)
        _check_graph(s.u, sample.fields.v, s.t)
        if config.on_sample is not None:
            config.on_sample(sample)
        return sample

    try:
        sample = record(state)
        k = int(math.floor(state.t / cadence + 1e-9)) + 1
        while state.t < horizon - eps:
            target = min(k * cadence, horizon)
            dt = config.dt_policy(state)
            hit = state.t + dt >= target - eps
            if hit:
                dt = target - state.t
            state = step_flow(state, dt, config.scheme, geometry)
            traj.steps += 1
            if hit:
                state = state.evolve(state.u, target)
                sample = record(state)
                k += 1
                sup_h = float(np.max(np.abs(sample.fields.H)))
                if config.stop_tolerance is not None and sup_h < config.stop_tolerance:
                    logger.info(f"sup|H|={sup_h:.3e} below stop tolerance at t={state.t:.4g}")
                    traj.status = "converged"
                    return traj
    except BlowUpError as err:
        traj.status = "blow-up"
        traj.failure = {"node": list(err.node), "t": err.t, "value": err.value}
        err.trajectory = traj
        logger.error(f"Graph failure: {err}")
        raise

    traj.status = "completed"
    logger.info(f"Flow completed after {traj.steps} steps, {len(traj)} samples")
    return traj
