"""
Pointwise geometry of a graph (x, u(x)) in M x_phi R.

All frame components refer to the orthonormal frame e^_i of the base, so the tangent frame of
the graph is e_i = e^_i + u_i d_u and

    v   = sqrt(1 + phi^2 |grad u|^2)
    g   = delta + phi^2 u_i u_j,    g^-1 = delta - phi^2 u_i u_j / v^2
    N   = (-phi grad u + e_0) / v
    A_ij = (phi_i u_j + phi hess(u)_ij + phi^2 u_i u_j <grad u, grad phi> + u_i phi_j) / v
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional
from typing import Tuple

import numpy as np

from warpflow.geometry.base import BaseManifold
from warpflow.geometry.grid import angular_cutoffs
from warpflow.geometry.grid import Chart
from warpflow.geometry.grid import Grid
from warpflow.geometry.warp import WarpFactor
from warpflow.graphflow.state import GraphState


@dataclass(frozen=True)
class SampledGeometry:
    """Time-independent base and warp data sampled once on the grid."""

    phi: np.ndarray
    grad_phi: np.ndarray
    hess_phi: np.ndarray
    ricci: np.ndarray
    volume: np.ndarray
    cutoffs: Optional[np.ndarray] = None

    @classmethod
    def sample(cls, base: BaseManifold, warp: WarpFactor, grid: Grid) -> "SampledGeometry":
        coords = grid.coordinates()
        cutoffs = None
        if grid.chart == Chart.polar:
            profile, _, _ = base.profile(grid.axes[0])
            cutoffs = angular_cutoffs(grid, profile)
        return cls(
            phi=warp.checked_value(base, *coords),
            grad_phi=warp.gradient(base, *coords),
            hess_phi=warp.hessian(base, *coords),
            ricci=base.ricci(*coords),
            volume=base.volume_density(*coords) * np.prod(grid.spacing),
            cutoffs=cutoffs,
        )

    @classmethod
    def of(cls, state: GraphState) -> "SampledGeometry":
        return cls.sample(state.base, state.warp, state.grid)


@dataclass(frozen=True)
class GraphFields:
    t: float
    grad_u: np.ndarray
    v: np.ndarray
    normal: np.ndarray
    hess_u: np.ndarray
    H: np.ndarray
    A: np.ndarray
    A_norm2: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray

    @property
    def H_trace(self) -> np.ndarray:
        return np.einsum("ij...,ij...->...", self.g_inv, self.A)

    @property
    def sigma(self) -> np.ndarray:
        """<N, e_0> = 1/v."""
        return self.normal[0]


def compute_gradient_v(
    state: GraphState, geometry: Optional[SampledGeometry] = None
) -> Tuple[np.ndarray, np.ndarray]:
    geometry = geometry or SampledGeometry.of(state)
    grad_u = state.base.frame_gradient(state.u, state.grid)
    v = np.sqrt(1.0 + geometry.phi**2 * np.sum(grad_u**2, axis=0))
    return grad_u, v


def _principal_terms(grad_u, hess_u, v, geometry):
    phi = geometry.phi
    laplacian = np.einsum("ii...->...", hess_u)
    hess_gg = np.einsum("i...,j...,ij...->...", grad_u, grad_u, hess_u)
    grad_dot = np.einsum("i...,i...->...", grad_u, geometry.grad_phi)
    return laplacian - (phi**2 / v**2) * hess_gg, grad_dot


def mean_curvature(state: GraphState, geometry: Optional[SampledGeometry] = None) -> np.ndarray:
    """H = (phi/v)(lap u - (phi^2/v^2) hess u(grad u, grad u)) + <grad u, grad phi>(v^2+1)/v^3."""
    geometry = geometry or SampledGeometry.of(state)
    grad_u, v = compute_gradient_v(state, geometry)
    hess_u = state.base.frame_hessian(state.u, state.grid)
    principal, grad_dot = _principal_terms(grad_u, hess_u, v, geometry)
    return (geometry.phi / v) * principal + grad_dot * (v**2 + 1) / v**3


def flow_speed(
    state: GraphState, geometry: Optional[SampledGeometry] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    du/dt = (v/phi) H in the regular form

        lap u - (phi^2/v^2) hess u(grad u, grad u) + (1/phi)<grad u, grad phi>(v^2+1)/v^2,

    which needs no unit direction of grad u. Returns (du/dt, v).
    """
    geometry = geometry or SampledGeometry.of(state)
    grad_u, v = compute_gradient_v(state, geometry)
    hess_u = state.base.frame_hessian(state.u, state.grid)
    principal, grad_dot = _principal_terms(grad_u, hess_u, v, geometry)
    return principal + (grad_dot / geometry.phi) * (v**2 + 1) / v**2, v


def induced_metric(grad_u: np.ndarray, phi: np.ndarray, v: np.ndarray):
    n = grad_u.shape[0]
    eye = np.eye(n).reshape((n, n) + (1,) * (grad_u.ndim - 1))
    outer = phi**2 * np.einsum("i...,j...->ij...", grad_u, grad_u)
    return eye + outer, eye - outer / v**2


def second_fundamental_form(
    state: GraphState, geometry: Optional[SampledGeometry] = None
) -> Tuple[np.ndarray, np.ndarray]:
    fields = compute_fields(state, geometry)
    return fields.A, fields.A_norm2


def compute_fields(state: GraphState, geometry: Optional[SampledGeometry] = None) -> GraphFields:
    geometry = geometry or SampledGeometry.of(state)
    phi, grad_phi = geometry.phi, geometry.grad_phi
    grad_u, v = compute_gradient_v(state, geometry)
    hess_u = state.base.frame_hessian(state.u, state.grid)
    principal, grad_dot = _principal_terms(grad_u, hess_u, v, geometry)
    H = (phi / v) * principal + grad_dot * (v**2 + 1) / v**3

    cross = np.einsum("i...,j...->ij...", grad_phi, grad_u)
    A = (
        cross
        + np.swapaxes(cross, 0, 1)
        + phi * hess_u
        + phi**2 * np.einsum("i...,j...->ij...", grad_u, grad_u) * grad_dot
    ) / v
    g, g_inv = induced_metric(grad_u, phi, v)
    A_norm2 = np.einsum("ik...,jl...,ij...,kl...->...", g_inv, g_inv, A, A)

    normal = np.concatenate([(1.0 / v)[None], -phi * grad_u / v], axis=0)
    return GraphFields(
        t=state.t,
        grad_u=grad_u,
        v=v,
        normal=normal,
        hess_u=hess_u,
        H=H,
        A=A,
        A_norm2=A_norm2,
        g=g,
        g_inv=g_inv,
    )


def gradient_growth_rate(
    fields: GraphFields, geometry: SampledGeometry, speed: np.ndarray
) -> np.ndarray:
    """Pointwise bound v^2 |u_t| (|grad phi|/phi + |grad phi|) on |dv/dt|."""
    grad_norm = np.sqrt(np.sum(geometry.grad_phi**2, axis=0))
    return fields.v**2 * np.abs(speed) * (grad_norm / geometry.phi + grad_norm)
