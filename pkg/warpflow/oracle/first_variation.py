"""
First variation of area as the defining check of the mean curvature sign convention:
moving the graph by eps * chi along N changes its area by -eps * integral(H chi) to first order.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from warpflow.graphflow.fields import compute_fields
from warpflow.graphflow.fields import SampledGeometry
from warpflow.graphflow.state import GraphState
from warpflow.oracle import _fd
from warpflow.oracle.report import CheckResult

FD_EPSILON = 1e-5


def graph_area(state: GraphState, u: Optional[np.ndarray] = None) -> float:
    """Discrete area sum(v * dvol^) of the graph of u, from the oracle stencils."""
    grid = state.grid
    u = state.u if u is None else u
    coords = grid.coordinates()
    phi = state.warp.checked_value(state.base, *coords)
    du = _fd.gradient(u, grid)
    g_hat = state.base.metric(*coords)
    n = grid.ndim
    g_hat_inv = np.moveaxis(
        np.linalg.inv(np.moveaxis(g_hat.reshape(n, n, -1), -1, 0)), 0, -1
    ).reshape(g_hat.shape)
    grad2 = np.einsum("ab...,a...,b...->...", g_hat_inv, du, du)
    v = np.sqrt(1.0 + phi**2 * grad2)
    dvol = state.base.volume_density(*coords) * np.prod(grid.spacing)
    return float(np.sum(v * dvol))


def first_variation_check(
    state: GraphState,
    chi: np.ndarray,
    epsilon: float = FD_EPSILON,
    geometry: Optional[SampledGeometry] = None,
    tolerance: Optional[float] = None,
    atol: float = 1e-12,
) -> CheckResult:
    """
    Relative error between (A(u + eps w) - A(u - eps w)) / (2 eps) and -sum(H chi v dvol^),
    where w = chi v / phi is the height change whose normal component is chi. `chi` must vanish
    near the Dirichlet ring of polar grids.
    """
    geometry = geometry or SampledGeometry.of(state)
    fields = compute_fields(state, geometry)
    w = chi * fields.v / geometry.phi
    plus = graph_area(state, state.u + epsilon * w)
    minus = graph_area(state, state.u - epsilon * w)
    directional = (plus - minus) / (2 * epsilon)
    predicted = -float(np.sum(fields.H * chi * fields.v * geometry.volume))
    error = abs(directional - predicted) / max(abs(predicted), atol)
    return CheckResult(
        name="first_variation",
        error=error,
        tolerance=tolerance,
        details={"directional": directional, "predicted": predicted, "epsilon": epsilon},
    )
