"""
Mean curvature of the hypersurface generated by a profile curve.

With the isothermal chart q = cosh^2(r)(dw^2 + du^2) and nu the left unit normal of the oriented
polyline,

    H_gen = kappa_q - (n - 1) coth(r) nu^r,    kappa_q = (kappa_e - sinh(r) nu_e^w) / cosh(r),

where kappa_e is the signed circumscribed-circle curvature in the (w, u) plane. H_gen nu is
the mean curvature vector, so reversing the orientation flips the sign of H_gen only. On the
axis the two terms merge into n kappa_q.
"""
from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from warpflow.counterflow.curve import ProfileCurve


def _padded_nodes(curve: ProfileCurve) -> np.ndarray:
    """Isothermal nodes with one ghost at each end: the reflection (-w, u) of the neighbour for
    axis endpoints, a linear extension otherwise."""
    p = np.stack([curve.w, curve.u], axis=-1)
    first_axis, last_axis = curve.on_axis
    head = p[1] * [-1.0, 1.0] if first_axis else 2 * p[0] - p[1]
    tail = p[-2] * [-1.0, 1.0] if last_axis else 2 * p[-1] - p[-2]
    return np.concatenate([head[None], p, tail[None]])


def circumscribed_curvature(curve: ProfileCurve) -> Tuple[np.ndarray, np.ndarray]:
    """Signed Euclidean curvature and left unit normal at every node of the isothermal polyline."""
    p = _padded_nodes(curve)
    a = p[1:-1] - p[:-2]
    b = p[2:] - p[1:-1]
    c = p[2:] - p[:-2]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    la, lb, lc = (np.linalg.norm(x, axis=-1) for x in (a, b, c))
    kappa = 2.0 * cross / (la * lb * lc)
    normal = np.stack([-c[:, 1], c[:, 0]], axis=-1) / lc[:, None]
    return kappa, normal


def generated_mean_curvature(curve: ProfileCurve) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-node H_gen and the Euclidean left normal nu_e in the isothermal chart. Fixed (off-axis)
    endpoints get H_gen = 0.
    """
    kappa_e, normal = circumscribed_curvature(curve)
    r, n = curve.r, curve.n
    kappa_q = (kappa_e - np.sinh(r) * normal[:, 0]) / np.cosh(r)

    axis = r == 0.0
    safe_r = np.where(axis, 1.0, r)
    H = np.where(axis, n * kappa_q, kappa_q - (n - 1) * normal[:, 0] / np.tanh(safe_r))

    first_axis, last_axis = curve.on_axis
    if not first_axis:
        H[0] = 0.0
    if not last_axis:
        H[-1] = 0.0
    return H, normal


def orbit_volume(n: int) -> float:
    """Area of the unit sphere S^{n-1}."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def generated_area(curve: ProfileCurve) -> float:
    r_mid = 0.5 * (curve.r[1:] + curve.r[:-1])
    weight = np.sinh(r_mid) ** (curve.n - 1)
    return orbit_volume(curve.n) * float(np.sum(weight * curve.segment_lengths()))


def nodal_area(curve: ProfileCurve) -> np.ndarray:
    """Area element of each node: orbit area times half the adjacent q-segments."""
    seg = curve.segment_lengths()
    half = np.zeros(len(curve))
    half[:-1] += 0.5 * seg
    half[1:] += 0.5 * seg
    return orbit_volume(curve.n) * np.sinh(curve.r) ** (curve.n - 1) * half
