"""Oracles of the orbit-space reduction used by the counterflow module."""
from __future__ import annotations

from typing import Optional

import numpy as np

from warpflow.counterflow.charts import from_geodesic_chart
from warpflow.counterflow.charts import hyperboloid_point
from warpflow.counterflow.charts import minkowski
from warpflow.counterflow.charts import to_geodesic_chart
from warpflow.counterflow.curvature import generated_area
from warpflow.counterflow.curvature import generated_mean_curvature
from warpflow.counterflow.curvature import nodal_area
from warpflow.counterflow.curve import ProfileCurve
from warpflow.oracle.report import CheckResult
from warpflow.oracle.riemann import FD_STEP
from warpflow.oracle.riemann import richardson


def metric_pullback_check(
    samples: int = 32, seed: int = 0, tolerance: Optional[float] = 1e-8
) -> CheckResult:
    """
    Pull the Minkowski form back through the hyperboloid embedding (n = 2) by numerical
    differentiation and compare with dr^2 + cosh^2(r) du^2 + sinh^2(r) dtheta^2.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = np.array([rng.uniform(0.1, 3.0), rng.uniform(-2.0, 2.0), rng.uniform(0, 2 * np.pi)])
        jac = np.stack(
            [richardson(lambda p: hyperboloid_point(*p), x, a, FD_STEP) for a in range(3)]
        )
        pulled = np.array([[minkowski(jac[a], jac[b]) for b in range(3)] for a in range(3)])
        expected = np.diag([1.0, np.cosh(x[0]) ** 2, np.sinh(x[0]) ** 2])
        worst = max(worst, float(np.max(np.abs(pulled - expected))) / float(np.max(expected)))
    return CheckResult(
        name="metric_pullback", error=worst, tolerance=tolerance, details={"samples": samples}
    )


def chart_roundtrip_check(
    samples: int = 256, seed: int = 0, tolerance: Optional[float] = 1e-10
) -> CheckResult:
    """(r, u) -> (rho, l) -> (r, u) is the identity; sinh l is the hyperboloid distance to the
    slice x_1 = 0."""
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.0, 3.0, samples)
    u = rng.uniform(-2.0, 2.0, samples)
    rho, ell = to_geodesic_chart(r, u)
    r2, u2 = from_geodesic_chart(rho, ell)
    x = hyperboloid_point(r, u, 0.0)
    error = max(
        float(np.max(np.abs(r2 - r))),
        float(np.max(np.abs(u2 - u))),
        float(np.max(np.abs(np.sinh(ell) - x[1]) / np.cosh(ell))),
    )
    return CheckResult(
        name="chart_roundtrip", error=error, tolerance=tolerance, details={"samples": samples}
    )


def profile_first_variation_check(
    curve: ProfileCurve,
    chi: np.ndarray,
    epsilon: float = 1e-5,
    tolerance: Optional[float] = 1e-3,
) -> CheckResult:
    """
    Moving each node by eps chi along the q-unit normal changes the generated area by
    -eps sum(H_gen chi dA) to first order. `chi` must vanish at the endpoints.
    """
    H, normal = generated_mean_curvature(curve)

    def moved(sign: float) -> ProfileCurve:
        r = curve.r + sign * epsilon * chi * normal[:, 0]
        u = curve.u + sign * epsilon * chi * normal[:, 1] / np.cosh(curve.r)
        return curve.evolve(r, u, curve.t)

    directional = (generated_area(moved(1.0)) - generated_area(moved(-1.0))) / (2 * epsilon)
    predicted = -float(np.sum(H * chi * nodal_area(curve)))
    error = abs(directional - predicted) / max(abs(predicted), 1e-12)
    return CheckResult(
        name="profile_first_variation",
        error=error,
        tolerance=tolerance,
        details={"directional": directional, "predicted": predicted, "nodes": len(curve)},
    )


def generated_curvature_check(
    curve: ProfileCurve, expected: float, name: str, tolerance: Optional[float] = 1e-3
) -> CheckResult:
    """Interior H_gen of a profile whose generated hypersurface has constant mean curvature."""
    H, _ = generated_mean_curvature(curve)
    first_axis, last_axis = curve.on_axis
    # fixed endpoints carry H = 0 by construction
    moving = H[(0 if first_axis else 1) : (None if last_axis else -1)]
    error = float(np.max(np.abs(moving - expected))) / max(abs(expected), 1.0)
    return CheckResult(
        name=name,
        error=error,
        tolerance=tolerance,
        details={"expected": expected, "nodes": len(curve), "n": curve.n},
    )
