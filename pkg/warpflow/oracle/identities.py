from __future__ import annotations

from typing import Optional

import numpy as np

from warpflow.graphflow.fields import compute_fields
from warpflow.graphflow.fields import GraphFields
from warpflow.graphflow.fields import SampledGeometry
from warpflow.graphflow.state import GraphState
from warpflow.oracle import _fd
from warpflow.oracle.induced import InducedChart
from warpflow.oracle.report import CheckResult


def _max_error(error: np.ndarray, mask: np.ndarray) -> float:
    return float(np.max(np.abs(error[mask])))


def laplacian_identity_check(
    state: GraphState,
    geometry: Optional[SampledGeometry] = None,
    tolerance: Optional[float] = None,
    boundary_rings: int = 2,
) -> CheckResult:
    """
    Induced Laplacian of the height against -2<grad^ u, grad^ phi>/(phi v^2) + H/(phi v).

    The left side differentiates the induced metric in chart coordinates; the right side comes
    from the production GraphFields. Polar grids skip the outer rings.
    """
    geometry = geometry or SampledGeometry.of(state)
    fields = compute_fields(state, geometry)
    lhs = InducedChart.of(state).laplacian(state.u)

    phi, v = geometry.phi, fields.v
    grad_dot = np.einsum("i...,i...->...", fields.grad_u, geometry.grad_phi)
    rhs = -2 * grad_dot / (phi * v**2) + fields.H / (phi * v)

    mask = _fd.interior_mask(state.grid, boundary_rings)
    return CheckResult(
        name="laplacian_identity",
        error=_max_error(lhs - rhs, mask),
        tolerance=tolerance,
        details={"t": state.t, "grid": list(state.grid.shape)},
    )


def induced_gradient_norm2(fields: GraphFields) -> np.ndarray:
    """|grad u|^2 = g^ij u_i u_j with g^ij from a numerical inverse of the assembled g_ij."""
    n = fields.g.shape[0]
    g = np.moveaxis(fields.g.reshape(n, n, -1), -1, 0)
    g_inv = np.moveaxis(np.linalg.inv(g), 0, -1).reshape(fields.g.shape)
    return np.einsum("ij...,i...,j...->...", g_inv, fields.grad_u, fields.grad_u)


def gradient_identity_check(
    state: GraphState,
    geometry: Optional[SampledGeometry] = None,
    tolerance: Optional[float] = 1e-12,
) -> CheckResult:
    """
    |grad u|^2 = (1 - 1/v^2)/phi^2, and the ambient vector
    grad u = (grad^ u + |grad^ u|^2 d_u)/v^2 pairs with each tangent e^_i + u_i d_u to u_i.
    """
    geometry = geometry or SampledGeometry.of(state)
    fields = compute_fields(state, geometry)
    phi, v, p = geometry.phi, fields.v, fields.grad_u
    norm2 = induced_gradient_norm2(fields)
    closed = (1.0 - 1.0 / v**2) / phi**2

    p2 = np.sum(p**2, axis=0)
    pairing = p / v**2 + phi**2 * (p2 / v**2) * p
    error = max(
        float(np.max(np.abs(norm2 - closed))),
        float(np.max(np.abs(pairing - p))),
    )
    return CheckResult(
        name="gradient_identity",
        error=error,
        tolerance=tolerance,
        details={"t": state.t, "max_grad_norm2": float(np.max(norm2))},
    )
