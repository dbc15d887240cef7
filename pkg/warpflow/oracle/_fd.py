"""
Finite differences used by the oracles, kept apart from the production stencils of
`warpflow.geometry.grid`. Fields are padded (wrap for periodic axes, reflection through the
pole for polar radii) and differenced by slicing.
"""
from __future__ import annotations

import numpy as np

from warpflow.geometry.grid import Grid


def _slice(f: np.ndarray, ax: int, start, stop) -> np.ndarray:
    index = [slice(None)] * f.ndim
    index[ax] = slice(start, stop)
    return f[tuple(index)]


def pad(f: np.ndarray, grid: Grid, axis: int, parity: float = 1.0) -> np.ndarray:
    ax = f.ndim - grid.ndim + axis
    if grid.periodic[axis]:
        return np.concatenate([_slice(f, ax, -1, None), f, _slice(f, ax, 0, 1)], axis=ax)
    rotated = parity * np.roll(_slice(f, ax, 0, 1), f.shape[-1] // 2, axis=-1)
    outer = 2 * _slice(f, ax, -1, None) - _slice(f, ax, -2, -1)
    return np.concatenate([rotated, f, outer], axis=ax)


def d1(f: np.ndarray, grid: Grid, axis: int, parity: float = 1.0) -> np.ndarray:
    ax = f.ndim - grid.ndim + axis
    p = pad(f, grid, axis, parity)
    return (_slice(p, ax, 2, None) - _slice(p, ax, 0, -2)) / (2 * grid.spacing[axis])


def d2(f: np.ndarray, grid: Grid, axis: int, parity: float = 1.0) -> np.ndarray:
    ax = f.ndim - grid.ndim + axis
    p = pad(f, grid, axis, parity)
    mid = _slice(p, ax, 1, -1)
    return (_slice(p, ax, 2, None) - 2 * mid + _slice(p, ax, 0, -2)) / grid.spacing[axis] ** 2


def gradient(f: np.ndarray, grid: Grid) -> np.ndarray:
    return np.stack([d1(f, grid, a) for a in range(grid.ndim)])


def hessian(f: np.ndarray, grid: Grid) -> np.ndarray:
    n = grid.ndim
    out = np.empty((n, n) + f.shape)
    for a in range(n):
        out[a, a] = d2(f, grid, a)
    if n == 2:
        out[0, 1] = out[1, 0] = d1(d1(f, grid, 1), grid, 0)
    return out


def interior_mask(grid: Grid, rings: int = 2) -> np.ndarray:
    mask = np.ones(grid.shape, dtype=bool)
    if not grid.periodic[0]:
        mask[-rings:, :] = False
    return mask


def component_parity(grid: Grid, *indices: int) -> float:
    """Sign of a chart tensor component under the reflection through the pole: one factor of
    -1 per radial index."""
    if grid.periodic[0]:
        return 1.0
    return -1.0 if sum(1 for i in indices if i == 0) % 2 else 1.0
