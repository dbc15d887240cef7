"""
Curvature of the warped product by numerical differentiation of its metric.

The ambient metric is assembled in chart coordinates (x, u) as blockdiag(g^, phi^2), the
Christoffel symbols and the Riemann tensor are obtained by Richardson-extrapolated centered
differences, and the result is compared component by component with the closed forms of
`warpflow.geometry.ambient` in the orthonormal frame (e_0, e^_1, ..., e^_n).
"""
from __future__ import annotations

from typing import Callable
from typing import List
from typing import Optional
from typing import Sequence

import numpy as np
from loguru import logger

from warpflow.geometry.ambient import frame_curvature_tensor
from warpflow.geometry.base import BaseManifold
from warpflow.geometry.grid import Chart
from warpflow.geometry.warp import WarpFactor
from warpflow.oracle.report import CheckResult
from warpflow.utils.exceptions import IllConditionedMetricError
from warpflow.utils.exceptions import OracleSelfTestError

FD_STEP = 1e-3
CONDITION_LIMIT = 1e8
SYMMETRY_TOLERANCE = 1e-8


def richardson(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray, axis: int, h: float):
    """d fn / dx_axis from centered differences at h and h/2, leading error cancelled."""

    def centered(step):
        e = np.zeros_like(x)
        e[axis] = step
        return (fn(x + e) - fn(x - e)) / (2 * step)

    return (4 * centered(h / 2) - centered(h)) / 3


def ambient_metric(base: BaseManifold, warp: WarpFactor, point: np.ndarray) -> np.ndarray:
    """Chart components of g^ + phi^2 du^2 at (x, u); the last coordinate is u."""
    n = base.dimension
    coords = [np.float64(c) for c in point[:n]]
    g = np.zeros((n + 1, n + 1))
    g[:n, :n] = base.metric(*coords)
    g[n, n] = float(warp.value(base, *coords)) ** 2
    return g


def _checked_inverse(g: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise IllConditionedMetricError(float(cond))
    return np.linalg.inv(g)


def christoffel_fd(metric_fn, point: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Gamma[a, b, c] = Gamma^a_bc."""
    g = metric_fn(point)
    g_inv = _checked_inverse(g)
    dim = len(point)
    dg = np.stack([richardson(metric_fn, point, c, h) for c in range(dim)])  # dg[c, a, b]
    lowered = 0.5 * (
        np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - np.einsum("dbc->dbc", dg)
    )
    return np.einsum("ad,dbc->abc", g_inv, lowered)


def riemann_fd(metric_fn, point: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """
    Fully covariant T[a, b, c, d] = <R(d_a, d_b) d_d, d_c>, so that T[a, b, a, b] is the
    sectional curvature of a coordinate plane times its area element.
    """
    dim = len(point)
    gamma = christoffel_fd(metric_fn, point, h)
    d_gamma = np.stack(
        [richardson(lambda p: christoffel_fd(metric_fn, p, h), point, c, h) for c in range(dim)]
    )  # d_gamma[c, a, d, b] = d_c Gamma^a_db
    # R^a_{bcd} = component a of R(d_c, d_d) d_b
    upper = (
        np.einsum("cadb->abcd", d_gamma)
        - np.einsum("dacb->abcd", d_gamma)
        + np.einsum("ace,edb->abcd", gamma, gamma)
        - np.einsum("ade,ecb->abcd", gamma, gamma)
    )
    g = metric_fn(point)
    return np.einsum("ce,edab->abcd", g, upper)


def ambient_frame(base: BaseManifold, warp: WarpFactor, point: np.ndarray) -> np.ndarray:
    """E[p, a]: chart components of e_0 = (1/phi) d_u and of the lifted base frame."""
    n = base.dimension
    coords = [np.float64(c) for c in point[:n]]
    frame = np.zeros((n + 1, n + 1))
    frame[0, n] = 1.0 / float(warp.value(base, *coords))
    frame[1:, :n] = base.frame(*coords)
    return frame


def symmetry_defect(t: np.ndarray) -> float:
    """Largest violation of the algebraic symmetries and the first Bianchi identity."""
    defects = [
        t + np.einsum("abcd->bacd", t),
        t + np.einsum("abcd->abdc", t),
        t - np.einsum("abcd->cdab", t),
        t + np.einsum("abcd->bcad", t) + np.einsum("abcd->cabd", t),
    ]
    scale = max(1.0, float(np.max(np.abs(t))))
    return max(float(np.max(np.abs(d))) for d in defects) / scale


def frame_riemann_fd(
    base: BaseManifold, warp: WarpFactor, x: Sequence[float], h: float = FD_STEP
) -> np.ndarray:
    point = np.append(np.asarray(x, dtype=np.float64), 0.0)
    t = riemann_fd(lambda p: ambient_metric(base, warp, p), point, h)
    defect = symmetry_defect(t)
    if defect > SYMMETRY_TOLERANCE:
        raise OracleSelfTestError(
            f"finite-difference curvature at {list(x)} violates its symmetries by {defect:.2e}"
        )
    e = ambient_frame(base, warp, point)
    return np.einsum("pa,qb,rc,sd,abcd->pqrs", e, e, e, e, t)


def default_sample_points(base: BaseManifold, count: int = 6, seed: int = 0) -> List[tuple]:
    """Chart points away from the pole (polar charts) spread over a fundamental domain."""
    rng = np.random.default_rng(seed)
    if base.chart == Chart.polar:
        r = rng.uniform(0.3, 2.0, size=count)
        theta = rng.uniform(0.0, 2 * np.pi, size=count)
        return list(zip(r, theta))
    if base.dimension == 1:
        return [(x,) for x in rng.uniform(0.0, base.circumference, size=count)]
    return list(zip(*(rng.uniform(0.0, p, size=count) for p in base.periods)))


def fd_riemann_check(
    base: BaseManifold,
    warp: WarpFactor,
    points: Optional[Sequence[Sequence[float]]] = None,
    h: float = FD_STEP,
    tolerance: Optional[float] = 1e-4,
) -> CheckResult:
    """
    Worst relative error max|Rm_fd - Rm| / max(1, max|Rm|) between the numerically
    differentiated curvature tensor and the closed forms over the sample points. Points with an
    ill-conditioned metric are rejected and listed in the details.
    """
    warp.check_compatible(base)
    points = default_sample_points(base) if points is None else points
    worst, worst_point, rejected, used = 0.0, None, [], 0
    for x in points:
        base.check_point(*x)
        try:
            fd = frame_riemann_fd(base, warp, x, h)
        except IllConditionedMetricError as err:
            logger.warning(f"Rejected sample {list(x)}: {err}")
            rejected.append([float(c) for c in x])
            continue
        closed = frame_curvature_tensor(base, warp, *[np.float64(c) for c in x])
        err = float(np.max(np.abs(fd - closed))) / max(1.0, float(np.max(np.abs(closed))))
        used += 1
        if err >= worst:
            worst, worst_point = err, [float(c) for c in x]

    if used == 0:
        worst = float("nan")
    return CheckResult(
        name=f"fd_riemann[{base.key}, {warp.key}]",
        error=worst,
        tolerance=tolerance,
        details={"worst_point": worst_point, "samples": used, "rejected": rejected, "h": h},
    )
