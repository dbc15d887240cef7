"""
Residual of the evolution equation of the gradient function v along a sampled trajectory.

Under the normal flow dF/dt = H N,

    dv/dt = lap v - (2/v)|grad v|^2 + (2/phi)<grad v, grad phi> - v|A|^2
            - v(1 - 1/v^2)(lap^ phi/phi + Ric^(e1, e1) + |grad^ phi|^2/phi^2 - hess phi(e1, e1)/phi)

with e1 the unit direction of grad^ u. Graph samples are taken at fixed base points, which
moves every point tangentially by v H e_0^T = v H phi grad u, so the time derivative at fixed x
carries the extra transport term v H phi <grad v, grad u>.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from warpflow.graphflow.fields import SampledGeometry
from warpflow.graphflow.flow import Trajectory
from warpflow.graphflow.flow import TrajectorySample
from warpflow.oracle import _fd
from warpflow.oracle.induced import InducedChart


@dataclass(frozen=True)
class ResidualSeries:
    times: np.ndarray
    values: np.ndarray

    @property
    def max(self) -> float:
        return float(np.max(self.values)) if len(self.values) else 0.0

    def to_dict(self):
        return {"times": self.times.tolist(), "values": self.values.tolist(), "max": self.max}


def _time_derivative(prev: TrajectorySample, mid: TrajectorySample, nxt: TrajectorySample):
    h1, h2 = mid.t - prev.t, nxt.t - mid.t
    return (
        -h2 / (h1 * (h1 + h2)) * prev.fields.v
        + (h2 - h1) / (h1 * h2) * mid.fields.v
        + h1 / (h2 * (h1 + h2)) * nxt.fields.v
    )


def curvature_bracket(sample: TrajectorySample, geometry: SampledGeometry) -> np.ndarray:
    """
    v(1 - 1/v^2)(...)(e1) in the regular form
    (phi^2/v)(|p|^2 (lap^ phi/phi + |grad^ phi|^2/phi^2) + Ric^(p, p) - hess phi(p, p)/phi),
    p = grad^ u, which vanishes with p and needs no unit direction.
    """
    phi, v, p = geometry.phi, sample.fields.v, sample.fields.grad_u
    p2 = np.sum(p**2, axis=0)
    lap_phi = np.einsum("ii...->...", geometry.hess_phi)
    grad_phi2 = np.sum(geometry.grad_phi**2, axis=0)
    ric_pp = np.einsum("ij...,i...,j...->...", geometry.ricci, p, p)
    hess_pp = np.einsum("ij...,i...,j...->...", geometry.hess_phi, p, p)
    return (phi**2 / v) * (p2 * (lap_phi / phi + grad_phi2 / phi**2) + ric_pp - hess_pp / phi)


def v_evolution_rhs(sample: TrajectorySample, geometry: SampledGeometry) -> np.ndarray:
    """Right-hand side of the v evolution at fixed base points, transport term included."""
    chart = InducedChart.of(sample.state)
    fields = sample.fields
    v, phi = fields.v, geometry.phi
    dv = chart.partials(v)
    dphi = chart.partials(phi)
    return (
        chart.laplacian(v)
        - (2 / v) * chart.inner(dv, dv)
        + (2 / phi) * chart.inner(dv, dphi)
        - v * fields.A_norm2
        - curvature_bracket(sample, geometry)
        + v * fields.H * phi * chart.inner(dv, chart.du)
    )


def v_evolution_residual(traj: Trajectory, boundary_rings: int = 2) -> ResidualSeries:
    """Max-norm residual at every sample with a neighbour on both sides."""
    samples: List[TrajectorySample] = traj.samples
    if len(samples) < 3:
        raise ValueError(f"need three consecutive samples, the trajectory has {len(samples)}")
    mask = _fd.interior_mask(traj.grid, boundary_rings)
    times, values = [], []
    for prev, mid, nxt in zip(samples, samples[1:], samples[2:]):
        residual = _time_derivative(prev, mid, nxt) - v_evolution_rhs(mid, traj.geometry)
        times.append(mid.t)
        values.append(float(np.max(np.abs(residual[mask]))))
    return ResidualSeries(times=np.array(times), values=np.array(values))
