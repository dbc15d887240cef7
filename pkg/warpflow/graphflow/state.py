from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from warpflow.geometry.base import BaseManifold
from warpflow.geometry.grid import Chart
from warpflow.geometry.grid import Grid
from warpflow.geometry.warp import WarpFactor
from warpflow.utils.exceptions import BoundaryPolicyError


class BoundaryPolicy(Enum):
    periodic = "periodic"
    dirichlet = "dirichlet"


def default_policy(grid: Grid) -> BoundaryPolicy:
    return BoundaryPolicy.dirichlet if grid.chart == Chart.polar else BoundaryPolicy.periodic


@dataclass(frozen=True)
class GraphState:
    """
    Height function u of the graph x -> (x, u(x)) on the grid nodes at time t.

    States are immutable: `u` is stored as a read-only copy. Dirichlet states keep their
    outer ring frozen to the initial values.
    """

    base: BaseManifold
    warp: WarpFactor
    grid: Grid
    u: np.ndarray
    t: float = 0.0
    policy: Optional[BoundaryPolicy] = None

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64, copy=True)
        if u.shape != self.grid.shape:
            raise ValueError(f"u has shape {u.shape}, the grid has shape {self.grid.shape}")
        if not np.all(np.isfinite(u)):
            raise ValueError("u must be finite at every node")
        if self.grid.ndim != self.base.dimension:
            raise ValueError(
                f"grid dimension {self.grid.ndim} != base dimension {self.base.dimension}"
            )
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        policy = self.policy if self.policy is not None else default_policy(self.grid)
        object.__setattr__(self, "policy", BoundaryPolicy(policy))
        object.__setattr__(self, "t", float(self.t))
        check_policy(self.grid, self.policy)

    def evolve(self, u: np.ndarray, t: float) -> "GraphState":
        return dataclasses.replace(self, u=u, t=t)

    @property
    def n(self) -> int:
        return self.base.dimension


def check_policy(grid: Grid, policy: BoundaryPolicy) -> None:
    if policy == BoundaryPolicy.periodic and grid.chart != Chart.cartesian:
        raise BoundaryPolicyError("the periodic policy only applies to circles and tori")
    if policy == BoundaryPolicy.dirichlet and grid.chart != Chart.polar:
        raise BoundaryPolicyError("the dirichlet policy only applies to truncated polar discs")
