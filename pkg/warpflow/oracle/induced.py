"""
The induced metric of a graph in chart coordinates, g_ab = g^_ab + phi^2 u_a u_b, with its
Christoffel symbols from finite differences of g itself. Used as the independent side of the
identity and residual oracles.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from warpflow.geometry.grid import Grid
from warpflow.graphflow.state import GraphState
from warpflow.oracle import _fd


def _inverse(g: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    moved = np.moveaxis(g.reshape(n, n, -1), -1, 0)
    return np.moveaxis(np.linalg.inv(moved), 0, -1).reshape(g.shape)


@dataclass(frozen=True)
class InducedChart:
    grid: Grid
    phi: np.ndarray
    du: np.ndarray
    metric: np.ndarray
    inverse: np.ndarray
    christoffel: np.ndarray

    @classmethod
    def of(cls, state: GraphState) -> "InducedChart":
        grid = state.grid
        coords = grid.coordinates()
        phi = state.warp.checked_value(state.base, *coords)
        du = _fd.gradient(state.u, grid)
        g = state.base.metric(*coords) + phi**2 * np.einsum("a...,b...->ab...", du, du)
        g_inv = _inverse(g)

        n = grid.ndim
        dg = np.empty((n,) + g.shape)
        for c in range(n):
            for a in range(n):
                for b in range(n):
                    dg[c, a, b] = _fd.d1(g[a, b], grid, c, _fd.component_parity(grid, a, b))
        lowered = 0.5 * (
            np.einsum("bdc...->dbc...", dg)
            + np.einsum("cdb...->dbc...", dg)
            - np.einsum("dbc...->dbc...", dg)
        )
        gamma = np.einsum("ad...,dbc...->abc...", g_inv, lowered)
        return cls(grid=grid, phi=phi, du=du, metric=g, inverse=g_inv, christoffel=gamma)

    def partials(self, f: np.ndarray) -> np.ndarray:
        return _fd.gradient(f, self.grid)

    def inner(self, df1: np.ndarray, df2: np.ndarray) -> np.ndarray:
        """g(grad f1, grad f2) from chart partials."""
        return np.einsum("ab...,a...,b...->...", self.inverse, df1, df2)

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        """g^ab (d_a d_b f - Gamma^c_ab d_c f)."""
        second = _fd.hessian(f, self.grid)
        second -= np.einsum("cab...,c...->ab...", self.christoffel, self.partials(f))
        return np.einsum("ab...,ab...->...", self.inverse, second)
