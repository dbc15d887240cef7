"""
Closed-form geometry of the warped product M x_phi R with metric g^ + phi^2 du^2.

Ambient frame index 0 is e_0 = (1/phi) d_u; indices 1..n are the lifted base frame e^_i.
Curvature tensors use the convention Rm[a, b, a, b] = sectional curvature of (e_a, e_b).
"""
from __future__ import annotations

from itertools import combinations
from typing import List
from typing import Sequence
from typing import Tuple

import numpy as np

from warpflow.geometry.base import BaseManifold
from warpflow.geometry.grid import Grid
from warpflow.geometry.warp import WarpFactor


def frame_curvature_tensor(base: BaseManifold, warp: WarpFactor, *coords) -> np.ndarray:
    """Rm with Rm_{0ijk} = 0, Rm_{0i0k} = -hess(phi)_{ik}/phi and Rm_{ijkl} = Rm^_{ijkl}."""
    n = base.dimension
    phi = warp.checked_value(base, *coords)
    x = -warp.hessian(base, *coords) / phi
    shape = np.shape(phi)
    rm = np.zeros((n + 1,) * 4 + shape)
    rm[0, 1:, 0, 1:] = x
    rm[1:, 0, 0, 1:] = -x
    rm[0, 1:, 1:, 0] = -x
    rm[1:, 0, 1:, 0] = x
    rm[1:, 1:, 1:, 1:] = base.riemann(*coords) * np.ones(shape)
    return rm


def frame_connection(base: BaseManifold, warp: WarpFactor, *coords) -> np.ndarray:
    """G[a, b, c] = <nabla_{e_a} e_b, e_c> of the warped product."""
    n = base.dimension
    phi = warp.checked_value(base, *coords)
    dlog = warp.gradient(base, *coords) / phi
    shape = np.shape(phi)
    gamma = np.zeros((n + 1,) * 3 + shape)
    gamma[0, 0, 1:] = -dlog
    gamma[0, 1:, 0] = dlog
    gamma[1:, 1:, 1:] = base.frame_connection(*coords) * np.ones(shape)
    return gamma


def ambient_ricci(rm: np.ndarray) -> np.ndarray:
    return np.einsum("abad...->bd...", rm)


def curvature_operator(rm: np.ndarray) -> Tuple[np.ndarray, List[Tuple[int, int]]]:
    """Curvature operator on the bivectors e_a ^ e_b (a < b)."""
    dim = rm.shape[0]
    pairs = list(combinations(range(dim), 2))
    q = np.stack([np.stack([rm[a, b, c, d] for (c, d) in pairs]) for (a, b) in pairs])
    return q, pairs


def plane_label(pair: Tuple[int, int]) -> str:
    a, b = pair
    return f"e{b}^e{a}"


def ambient_sectional(
    base: BaseManifold,
    warp: WarpFactor,
    x: Sequence[float],
    plane: str = "i0",
    i: int = 0,
    j: int = 1,
):
    """
    Sectional curvature of the (e_i, e_0) plane (`plane="i0"`) or of the horizontal
    (e_i, e_j) plane (`plane="ij"`) at the chart point x. Frame indices are 0-based base
    indices. Polar charts reject the pole.
    """
    coords = [np.asarray(c, dtype=np.float64) for c in x]
    base.check_point(*coords)
    if plane == "i0":
        phi = warp.checked_value(base, *coords)
        return -warp.hessian(base, *coords)[i, i] / phi
    elif plane == "ij":
        if base.dimension < 2 or i == j:
            raise ValueError(f"no horizontal plane ({i}, {j}) over a {base.dimension}-d base")
        return base.gauss_curvature(*coords)
    else:
        raise ValueError(f"Unknown plane: {plane}")


def sectional_maximum(base: BaseManifold, warp: WarpFactor, grid: Grid) -> Tuple[float, str]:
    """
    Largest ambient sectional curvature over all planes at the grid nodes. In dimension 2 and 3
    every bivector is decomposable, so the top eigenvalue of the curvature operator is attained
    by a plane.
    """
    rm = frame_curvature_tensor(base, warp, *grid.coordinates())
    q, pairs = curvature_operator(rm)
    q = np.moveaxis(q.reshape(len(pairs), len(pairs), -1), -1, 0)
    eigval, eigvec = np.linalg.eigh(q)
    node = int(np.argmax(eigval[:, -1]))
    top = eigvec[node, :, -1]
    return float(eigval[node, -1]), plane_label(pairs[int(np.argmax(np.abs(top)))])


def ricci_norm(base: BaseManifold, warp: WarpFactor, grid: Grid) -> np.ndarray:
    """Largest absolute eigenvalue of the ambient Ricci tensor per node."""
    ric = ambient_ricci(frame_curvature_tensor(base, warp, *grid.coordinates()))
    dim = ric.shape[0]
    ric = np.moveaxis(ric.reshape(dim, dim, -1), -1, 0)
    eig = np.linalg.eigvalsh(ric)
    return np.max(np.abs(eig), axis=-1).reshape(grid.shape)


def covariant_curvature_norm(base: BaseManifold, warp: WarpFactor, grid: Grid) -> np.ndarray:
    """|nabla Rm| per node from the frame connection and centered differences of Rm."""
    coords = grid.coordinates()
    rm = frame_curvature_tensor(base, warp, *coords)
    gamma = frame_connection(base, warp, *coords)
    dim = rm.shape[0]

    # components with an odd number of base indices flip sign through the pole
    index = np.indices((dim,) * 4)
    n_base = (index > 0).sum(axis=0)
    odd = (n_base % 2 == 1).reshape((dim,) * 4 + (1,) * grid.ndim)
    d_even = base.frame_derivative(rm, grid, parity=1.0)
    d_odd = base.frame_derivative(rm, grid, parity=-1.0)
    d_rm = np.where(odd[None], d_odd, d_even)

    nabla = np.zeros((dim,) + rm.shape)
    nabla[1:] = d_rm
    nabla -= np.einsum("abf...,fcde...->abcde...", gamma, rm)
    nabla -= np.einsum("acf...,bfde...->abcde...", gamma, rm)
    nabla -= np.einsum("adf...,bcfe...->abcde...", gamma, rm)
    nabla -= np.einsum("aef...,bcdf...->abcde...", gamma, rm)
    return np.sqrt(np.sum(nabla**2, axis=(0, 1, 2, 3, 4)))
