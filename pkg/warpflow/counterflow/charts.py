"""
Charts of the orbit half-plane of rotationally symmetric hypersurfaces in H^{n+1}.

H^{n+1} is realized as H^n x_{cosh r} R; a hypersurface invariant under the rotations fixing the
u-axis {r = 0} is generated by a profile curve in the half-plane P = {r >= 0} with orbit metric
q = dr^2 + cosh^2(r) du^2. In the hyperboloid model the point (r, u, theta) is

    p = (cosh r cosh u, cosh r sinh u, sinh r theta),   theta in S^{n-1},

the slice {u = 0} is the hyperplane x_1 = 0, and its signed distance l satisfies
sinh l = cosh r sinh u. The geodesic chart (rho, l) adds sinh rho = sinh r / cosh l.
"""
from __future__ import annotations

from typing import Tuple

import numpy as np


def isothermal(r: np.ndarray) -> np.ndarray:
    """w with dw = dr / cosh r, so that q = cosh^2(r) (dw^2 + du^2)."""
    return 2.0 * np.arctan(np.tanh(0.5 * np.asarray(r)))


def from_isothermal(w: np.ndarray) -> np.ndarray:
    return 2.0 * np.arctanh(np.tan(0.5 * np.asarray(w)))


def hyperboloid_point(r, u, theta) -> np.ndarray:
    """Minkowski coordinates of (r, u, theta) for n = 2, theta an angle."""
    r, u, theta = np.broadcast_arrays(*(np.asarray(x, dtype=np.float64) for x in (r, u, theta)))
    return np.stack(
        [
            np.cosh(r) * np.cosh(u),
            np.cosh(r) * np.sinh(u),
            np.sinh(r) * np.cos(theta),
            np.sinh(r) * np.sin(theta),
        ]
    )


def minkowski(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return -x[0] * y[0] + np.sum(x[1:] * y[1:], axis=0)


def to_geodesic_chart(r, u) -> Tuple[np.ndarray, np.ndarray]:
    """(rho, l): distance along the slice and signed distance from it."""
    r, u = np.asarray(r, dtype=np.float64), np.asarray(u, dtype=np.float64)
    ell = np.arcsinh(np.cosh(r) * np.sinh(u))
    rho = np.arcsinh(np.sinh(r) / np.cosh(ell))
    return rho, ell


def from_geodesic_chart(rho, ell) -> Tuple[np.ndarray, np.ndarray]:
    rho, ell = np.asarray(rho, dtype=np.float64), np.asarray(ell, dtype=np.float64)
    r = np.arcsinh(np.sinh(rho) * np.cosh(ell))
    u = np.arcsinh(np.sinh(ell) / np.cosh(r))
    return r, u


def slice_distance_gradient(r, u) -> Tuple[np.ndarray, np.ndarray]:
    """(d_r l, d_u l); dl is a q-unit covector."""
    r, u = np.asarray(r, dtype=np.float64), np.asarray(u, dtype=np.float64)
    cosh_ell = np.sqrt(1.0 + (np.cosh(r) * np.sinh(u)) ** 2)
    return np.sinh(r) * np.sinh(u) / cosh_ell, np.cosh(r) * np.cosh(u) / cosh_ell


def distance_to_origin(r, u) -> np.ndarray:
    """Distance to the point (r, u) = (0, 0): cosh rho = cosh r cosh u."""
    return np.arccosh(np.cosh(r) * np.cosh(u))


def equidistant_height(r, ell: float) -> np.ndarray:
    """Profile u(r) of the equidistant hypersurface {l = ell}."""
    return np.arcsinh(np.sinh(ell) / np.cosh(np.asarray(r, dtype=np.float64)))
