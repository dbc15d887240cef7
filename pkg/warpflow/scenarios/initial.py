"""
Catalog of initial heights u_0 on a grid. Parameters come from the `initial` section of a
scenario; `noise` adds a seeded uniform perturbation of the given amplitude.
"""
from __future__ import annotations

from typing import Any
from typing import Callable
from typing import Dict
from typing import List
from typing import Mapping
from typing import Optional
from typing import Sequence

import numpy as np

from warpflow.geometry.grid import Chart
from warpflow.geometry.grid import Grid


def _axes(grid: Grid) -> List[np.ndarray]:
    """Cartesian coordinates of the nodes: (r cos theta, r sin theta) on polar discs."""
    coords = grid.coordinates()
    if grid.chart == Chart.polar:
        r, theta = coords
        return [r * np.cos(theta), r * np.sin(theta)]
    return coords


def _centered(grid: Grid, center: Optional[Sequence[float]]) -> List[np.ndarray]:
    """Offsets from `center`, wrapped into [-L/2, L/2) on periodic axes."""
    axes = _axes(grid)
    if center is None:
        if grid.chart == Chart.polar:
            center = [0.0] * len(axes)
        else:
            center = [o + 0.5 * h * n for o, h, n in zip(grid.origin, grid.spacing, grid.shape)]
    if len(center) != len(axes):
        raise ValueError(f"center has {len(center)} coordinates, the grid has {len(axes)} axes")
    out = []
    for i, (x, c) in enumerate(zip(axes, center)):
        d = x - c
        if grid.chart == Chart.cartesian and grid.periodic[i]:
            period = grid.spacing[i] * grid.shape[i]
            d = (d + 0.5 * period) % period - 0.5 * period
        out.append(d)
    return out


def constant(grid: Grid, value: float = 0.0) -> np.ndarray:
    return np.full(grid.shape, float(value))


def sinusoid(
    grid: Grid, amplitude: float = 0.8, modes: Optional[Sequence[int]] = None
) -> np.ndarray:
    """a prod_i sin(m_i x_i); on polar discs the Cartesian coordinates are used."""
    axes = _axes(grid)
    modes = [1] * len(axes) if modes is None else list(modes)
    if len(modes) != len(axes):
        raise ValueError(f"{len(modes)} modes for {len(axes)} axes")
    return amplitude * np.prod([np.sin(m * x) for m, x in zip(modes, axes)], axis=0)


def gaussian_bump(
    grid: Grid,
    amplitude: float = 0.8,
    width: float = 1.0,
    center: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """a exp(-|x - c|^2 / w^2)."""
    if width <= 0:
        raise ValueError(f"width must be positive, got {width}")
    d2 = sum(d**2 for d in _centered(grid, center))
    return amplitude * np.exp(-d2 / width**2)


def lipschitz_cone(
    grid: Grid, slope: float = 0.5, center: Optional[Sequence[float]] = None
) -> np.ndarray:
    """s |x - c| with the distance periodized on circles and tori; Lipschitz, not C^1."""
    return slope * np.sqrt(sum(d**2 for d in _centered(grid, center)))


def tanh_ramp(
    grid: Grid,
    amplitude: float = 1.0,
    slope: float = 2.0,
    center: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """a tanh(s r) on polar discs, a tanh(s sin(x_1 - c_1)) on periodic grids."""
    if grid.chart == Chart.polar:
        r, _ = grid.coordinates()
        return amplitude * np.tanh(slope * r)
    d = _centered(grid, center)[0]
    return amplitude * np.tanh(slope * np.sin(d))


INITIAL_DATA: Dict[str, Callable[..., np.ndarray]] = {
    "constant": constant,
    "sinusoid": sinusoid,
    "gaussian-bump": gaussian_bump,
    "lipschitz-cone": lipschitz_cone,
    "tanh-ramp": tanh_ramp,
}


def initial_height(grid: Grid, conf: Mapping[str, Any], seed: int = 0) -> np.ndarray:
    """Evaluate the catalog entry `conf['kind']` on the grid, plus seeded noise if requested."""
    params = dict(conf)
    kind = params.pop("kind", None)
    noise = float(params.pop("noise", 0.0))
    if kind not in INITIAL_DATA:
        raise ValueError(f"Unknown initial data: {kind}. Known kinds: {sorted(INITIAL_DATA)}")
    u = np.asarray(INITIAL_DATA[kind](grid, **params), dtype=np.float64)
    if noise > 0:
        rng = np.random.default_rng(seed)
        u = u + noise * rng.uniform(-1.0, 1.0, size=grid.shape)
    if not np.all(np.isfinite(u)):
        raise ValueError(f"initial data {kind} is not finite on the grid")
    return u
