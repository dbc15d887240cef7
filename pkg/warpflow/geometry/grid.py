from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from typing import List
from typing import Sequence
from typing import Tuple

import numpy as np


class Chart(Enum):
    cartesian = "cartesian"
    polar = "polar"


@dataclass(frozen=True)
class Grid:
    """
    Uniform node grid in chart coordinates.

    Cartesian grids are periodic boxes (circle or torus). Polar grids cover the disc r <= R with
    staggered radial nodes r_i = (i + 1/2) h, so that the pole is never a node; the last ring
    sits exactly on r = R. Field arrays carry the grid axes last: `(..., *grid.shape)`.
    """

    chart: Chart
    shape: Tuple[int, ...]
    spacing: Tuple[float, ...]
    origin: Tuple[float, ...]
    periodic: Tuple[bool, ...]
    _axes: Tuple[np.ndarray, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        axes = tuple(
            o + h * np.arange(n, dtype=np.float64)
            for o, h, n in zip(self.origin, self.spacing, self.shape)
        )
        object.__setattr__(self, "_axes", axes)

    @classmethod
    def periodic_box(cls, periods: Sequence[float], resolution: Sequence[int]) -> "Grid":
        if len(periods) != len(resolution):
            raise ValueError(f"periods {periods} and resolution {resolution} differ in length")
        return cls(
            chart=Chart.cartesian,
            shape=tuple(int(n) for n in resolution),
            spacing=tuple(float(L) / int(n) for L, n in zip(periods, resolution)),
            origin=tuple(0.0 for _ in periods),
            periodic=tuple(True for _ in periods),
        )

    @classmethod
    def polar_disc(cls, radius: float, resolution: Sequence[int]) -> "Grid":
        n_r, n_theta = (int(n) for n in resolution)
        if n_theta % 2 != 0:
            raise ValueError(f"angular resolution must be even, got {n_theta}")
        h_r = float(radius) / (n_r - 0.5)
        return cls(
            chart=Chart.polar,
            shape=(n_r, n_theta),
            spacing=(h_r, 2 * math.pi / n_theta),
            origin=(0.5 * h_r, 0.0),
            periodic=(False, True),
        )

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def axes(self) -> Tuple[np.ndarray, ...]:
        return self._axes

    @property
    def radius(self) -> float:
        if self.chart != Chart.polar:
            raise ValueError("only polar grids have a truncation radius")
        return float(self._axes[0][-1])

    def coordinates(self) -> List[np.ndarray]:
        return np.meshgrid(*self._axes, indexing="ij")

    @property
    def h_min(self) -> float:
        """Smallest effective spacing. Polar grids are angularly filtered down to h_r."""
        if self.chart == Chart.polar:
            return self.spacing[0]
        return min(self.spacing)

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        if self.chart == Chart.polar:
            mask[-1, :] = True
        return mask

    def refined(self, factor: int = 2) -> "Grid":
        if self.chart == Chart.polar:
            n_r, n_theta = self.shape
            return Grid.polar_disc(self.radius, (factor * n_r, factor * n_theta))
        periods = [h * n for h, n in zip(self.spacing, self.shape)]
        return Grid.periodic_box(periods, [factor * n for n in self.shape])

    def pole_value(self, f: np.ndarray) -> np.ndarray:
        """Reconstruct the value at the pole as the angular mean of the innermost ring."""
        if self.chart != Chart.polar:
            raise ValueError("only polar grids have a pole")
        return f[..., 0, :].mean(axis=-1)


def _take(f: np.ndarray, axis: int, start: int, stop: int = None) -> np.ndarray:
    index = [slice(None)] * f.ndim
    index[axis] = slice(start, stop)
    return f[tuple(index)]


def _with_pole_ghost(f: np.ndarray, grid: Grid, parity: float) -> np.ndarray:
    """Prepend the ring at r = -h/2, i.e. the innermost ring rotated by pi."""
    half = grid.shape[1] // 2
    ghost = parity * np.roll(f[..., :1, :], half, axis=-1)
    return np.concatenate([ghost, f], axis=-2)


def diff1(f: np.ndarray, grid: Grid, axis: int, parity: float = 1.0) -> np.ndarray:
    """Centered first derivative along a grid axis, second order everywhere.

    `parity` is the sign picked up by the field under the reflection through the pole.
    """
    h = grid.spacing[axis]
    ax = f.ndim - grid.ndim + axis
    if grid.periodic[axis]:
        return (np.roll(f, -1, axis=ax) - np.roll(f, 1, axis=ax)) / (2 * h)

    g = _with_pole_ghost(f, grid, parity)
    inner = (_take(g, ax, 2) - _take(g, ax, 0, -2)) / (2 * h)
    edge = (3 * _take(f, ax, -1) - 4 * _take(f, ax, -2, -1) + _take(f, ax, -3, -2)) / (2 * h)
    return np.concatenate([inner, edge], axis=ax)


def diff2(f: np.ndarray, grid: Grid, axis: int, parity: float = 1.0) -> np.ndarray:
    """Centered second derivative along a grid axis."""
    h = grid.spacing[axis]
    ax = f.ndim - grid.ndim + axis
    if grid.periodic[axis]:
        return (np.roll(f, -1, axis=ax) - 2 * f + np.roll(f, 1, axis=ax)) / h**2

    g = _with_pole_ghost(f, grid, parity)
    inner = (_take(g, ax, 2) - 2 * _take(g, ax, 1, -1) + _take(g, ax, 0, -2)) / h**2
    edge = (
        2 * _take(f, ax, -1)
        - 5 * _take(f, ax, -2, -1)
        + 4 * _take(f, ax, -3, -2)
        - _take(f, ax, -4, -3)
    ) / h**2
    return np.concatenate([inner, edge], axis=ax)


def diff11(f: np.ndarray, grid: Grid, parity: float = 1.0) -> np.ndarray:
    """Mixed derivative d^2 f / dx_0 dx_1 (angular derivative taken first on polar grids)."""
    return diff1(diff1(f, grid, 1, parity=parity), grid, 0, parity=parity)


def angular_cutoffs(grid: Grid, profile: np.ndarray) -> np.ndarray:
    """Highest angular mode kept on each ring so that f(r) dtheta never resolves below h_r."""
    n_modes = grid.shape[1] // 2 + 1
    m_max = np.floor(2.0 * profile / grid.spacing[0]).astype(int)
    return np.minimum(m_max, n_modes - 1)


def angular_filter(f: np.ndarray, cutoffs: np.ndarray) -> np.ndarray:
    """Zero the angular Fourier modes above the per-ring cutoff."""
    n_theta = f.shape[-1]
    rows = np.flatnonzero(cutoffs < n_theta // 2)
    if rows.size == 0:
        return f
    spectrum = np.fft.rfft(f[..., rows, :], axis=-1)
    modes = np.arange(spectrum.shape[-1])
    keep = modes[None, :] <= cutoffs[rows][:, None]
    out = f.copy()
    out[..., rows, :] = np.fft.irfft(np.where(keep, spectrum, 0.0), n=n_theta, axis=-1)
    return out
