from warpflow.monitors.base import Monitor
from warpflow.monitors.bounds import Decay
from warpflow.monitors.bounds import FrakgBound
from warpflow.monitors.bounds import GradientBound
from warpflow.monitors.bounds import GraphProperty
from warpflow.monitors.bounds import Regularization
from warpflow.monitors.residual import VResidual

MONITORS = {
    "gradient_bound": GradientBound,
    "frakg_bound": FrakgBound,
    "regularization": Regularization,
    "decay": Decay,
    "graph_property": GraphProperty,
    "v_residual": VResidual,
}


def AutoMonitor(name: str, **kwargs) -> Monitor:
    if name not in MONITORS:
        raise ValueError(f"Unknown monitor: {name}. Known monitors: {sorted(MONITORS)}")
    return MONITORS[name](**kwargs)
