import abc

from warpflow.graphflow.state import GraphState

MAX_CFL_FRACTION = 0.9


class TimeStepPolicy(object):
    def __init__(self, *, max_dt: float = None):
        self.max_dt = max_dt

    @abc.abstractmethod
    def __call__(self, state: GraphState) -> float:
        ...

    def describe(self) -> dict:
        return {"mode": self.mode}


class CflTimeStep(TimeStepPolicy):
    """dt = c h_min^2 / (2n); the top-order symbol of the flow operator is bounded by the
    Laplacian, so c <= 1 is stable for explicit Euler."""

    mode = "cfl"

    def __init__(self, *, fraction: float = 0.4, **kwargs):
        super().__init__(**kwargs)
        if not 0 < fraction <= MAX_CFL_FRACTION:
            raise ValueError(f"cfl fraction must lie in (0, {MAX_CFL_FRACTION}], got {fraction}")
        self.fraction = fraction

    def __call__(self, state: GraphState) -> float:
        dt = self.fraction * state.grid.h_min**2 / (2 * state.n)
        if self.max_dt is not None:
            dt = min(dt, self.max_dt)
        return dt

    def describe(self) -> dict:
        return {"mode": self.mode, "fraction": self.fraction}


class FixedTimeStep(TimeStepPolicy):
    mode = "fixed"

    def __init__(self, *, dt: float, **kwargs):
        super().__init__(**kwargs)
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.dt = dt

    def __call__(self, state: GraphState) -> float:
        return self.dt

    def describe(self) -> dict:
        return {"mode": self.mode, "dt": self.dt}


def AutoTimeStep(*, mode="cfl", **kwargs) -> TimeStepPolicy:
    if mode == "cfl":
        return CflTimeStep(**kwargs)
    elif mode == "fixed":
        return FixedTimeStep(**kwargs)
    else:
        raise ValueError(f"Unknown time step mode: {mode}")
