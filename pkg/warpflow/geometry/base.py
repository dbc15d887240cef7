from __future__ import annotations

import abc
import math
from pathlib import Path
from typing import Any
from typing import Dict
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
from loguru import logger
from scipy.interpolate import CubicSpline

from warpflow.geometry.comparison import comparison_fn
from warpflow.geometry.grid import Chart
from warpflow.geometry.grid import diff1
from warpflow.geometry.grid import diff2
from warpflow.geometry.grid import diff11
from warpflow.geometry.grid import Grid
from warpflow.utils.exceptions import PoleExclusionError


class BaseManifold:
    """
    Base manifold (M, g^) of the warped product, described in one global chart with an
    orthonormal frame e^_i.

    Fields on a grid are numpy arrays whose trailing axes are the grid axes. Frame tensors carry
    their frame indices first, e.g. a frame Hessian has shape `(n, n, *grid.shape)`.
    """

    key: str = "base"
    chart: Chart = Chart.cartesian
    dimension: int = 2
    compact: bool = True

    @abc.abstractmethod
    def make_grid(self, resolution: Sequence[int], truncation_radius: Optional[float] = None):
        raise NotImplementedError

    @abc.abstractmethod
    def metric(self, *coords: np.ndarray) -> np.ndarray:
        """Chart components g^_ab, shape (n, n, ...)."""
        raise NotImplementedError

    @abc.abstractmethod
    def frame(self, *coords: np.ndarray) -> np.ndarray:
        """Chart components E[i, a] of the orthonormal frame vector e^_i."""
        raise NotImplementedError

    @abc.abstractmethod
    def christoffel(self, *coords: np.ndarray) -> np.ndarray:
        """Chart Christoffel symbols G[c, a, b] = Gamma^c_ab."""
        raise NotImplementedError

    @abc.abstractmethod
    def frame_connection(self, *coords: np.ndarray) -> np.ndarray:
        """W[i, j, k] = <nabla_{e^_i} e^_j, e^_k>."""
        raise NotImplementedError

    @abc.abstractmethod
    def gauss_curvature(self, *coords: np.ndarray) -> np.ndarray:
        """Sectional curvature of the (e^_1, e^_2) plane; zero for curves."""
        raise NotImplementedError

    @abc.abstractmethod
    def sectional_lower_bound(self, grid: Grid) -> float:
        raise NotImplementedError

    @abc.abstractmethod
    def distance_to_pole(self, *coords: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @abc.abstractmethod
    def volume_density(self, *coords: np.ndarray) -> np.ndarray:
        """sqrt(det g^) in chart coordinates."""
        raise NotImplementedError

    def to_config(self) -> Dict[str, Any]:
        return {"kind": self.key}

    def check_point(self, *coords: np.ndarray) -> None:
        pass

    def ricci(self, *coords: np.ndarray) -> np.ndarray:
        """Frame components of the base Ricci tensor."""
        n = self.dimension
        k = self.gauss_curvature(*coords)
        return np.einsum("ij,...->ij...", np.eye(n), k * (n - 1))

    def riemann(self, *coords: np.ndarray) -> np.ndarray:
        """Frame components Rm[a, b, c, d] with Rm[a, b, a, b] the sectional curvature."""
        n = self.dimension
        k = self.gauss_curvature(*coords)
        delta = np.eye(n)
        structure = np.einsum("ac,bd->abcd", delta, delta) - np.einsum("ad,bc->abcd", delta, delta)
        return np.einsum("abcd,...->abcd...", structure, k)

    def frame_gradient(self, f: np.ndarray, grid: Grid) -> np.ndarray:
        """e^_i(f) from centered differences, shape (n, ...)."""
        coords = grid.coordinates()
        frame = self.frame(*coords)
        partials = np.stack([diff1(f, grid, a) for a in range(self.dimension)])
        return np.einsum("ia...,a...->i...", frame, partials)

    def frame_hessian(self, f: np.ndarray, grid: Grid) -> np.ndarray:
        """Covariant Hessian nabla^2 f (e^_i, e^_j) from centered differences."""
        n = self.dimension
        coords = grid.coordinates()
        partials = np.stack([diff1(f, grid, a) for a in range(n)])
        second = np.empty((n, n) + f.shape)
        for a in range(n):
            second[a, a] = diff2(f, grid, a)
        if n == 2:
            second[0, 1] = second[1, 0] = diff11(f, grid)
        second -= np.einsum("cab...,c...->ab...", self.christoffel(*coords), partials)
        frame = self.frame(*coords)
        return np.einsum("ia...,jb...,ab...->ij...", frame, frame, second)

    def frame_derivative(self, f: np.ndarray, grid: Grid, parity: float = 1.0) -> np.ndarray:
        """e^_i applied to every component of a tensor-valued field, shape (n, *f.shape)."""
        coords = grid.coordinates()
        frame = self.frame(*coords)
        partials = np.stack([diff1(f, grid, a, parity=parity) for a in range(self.dimension)])
        return np.einsum("ia...,a...->i...", frame, partials)


class FlatCircle(BaseManifold):
    key = "flat-circle"
    chart = Chart.cartesian
    dimension = 1
    compact = True

    def __init__(self, circumference: float = 2 * math.pi):
        self.circumference = float(circumference)

    def make_grid(self, resolution, truncation_radius=None) -> Grid:
        return Grid.periodic_box([self.circumference], resolution)

    def metric(self, x):
        return np.ones((1, 1) + np.shape(x))

    def frame(self, x):
        return np.ones((1, 1) + np.shape(x))

    def christoffel(self, x):
        return np.zeros((1, 1, 1) + np.shape(x))

    def frame_connection(self, x):
        return np.zeros((1, 1, 1) + np.shape(x))

    def gauss_curvature(self, x):
        return np.zeros(np.shape(x))

    def sectional_lower_bound(self, grid):
        return 0.0

    def distance_to_pole(self, x):
        raise ValueError("compact bases have no pole")

    def volume_density(self, x):
        return np.ones(np.shape(x))

    def to_config(self):
        return {"kind": self.key, "circumference": self.circumference}


class FlatTorus(BaseManifold):
    key = "flat-torus"
    chart = Chart.cartesian
    dimension = 2
    compact = True

    def __init__(self, periods: Sequence[float] = (2 * math.pi, 2 * math.pi)):
        self.periods = tuple(float(p) for p in periods)
        if len(self.periods) != 2:
            raise ValueError(f"flat-torus expects two periods, got {self.periods}")

    def make_grid(self, resolution, truncation_radius=None) -> Grid:
        return Grid.periodic_box(self.periods, resolution)

    def metric(self, x, y):
        return np.einsum("ab,...->ab...", np.eye(2), np.ones(np.broadcast(x, y).shape))

    def frame(self, x, y):
        return self.metric(x, y)

    def christoffel(self, x, y):
        return np.zeros((2, 2, 2) + np.broadcast(x, y).shape)

    def frame_connection(self, x, y):
        return np.zeros((2, 2, 2) + np.broadcast(x, y).shape)

    def gauss_curvature(self, x, y):
        return np.zeros(np.broadcast(x, y).shape)

    def sectional_lower_bound(self, grid):
        return 0.0

    def distance_to_pole(self, x, y):
        raise ValueError("compact bases have no pole")

    def volume_density(self, x, y):
        return np.ones(np.broadcast(x, y).shape)

    def to_config(self):
        return {"kind": self.key, "periods": list(self.periods)}


class PolarBase(BaseManifold):
    """
    Pole-based surface in geodesic polar coordinates, g^ = dr^2 + f(r)^2 dtheta^2,
    frame e^_1 = d_r, e^_2 = (1/f) d_theta.
    """

    chart = Chart.polar
    dimension = 2
    compact = False

    @abc.abstractmethod
    def profile(self, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(f, f', f'') at r."""
        raise NotImplementedError

    def make_grid(self, resolution, truncation_radius=None) -> Grid:
        if truncation_radius is None:
            raise ValueError(f"{self.key} requires a truncation radius")
        return Grid.polar_disc(truncation_radius, resolution)

    def check_point(self, r, theta=None):
        r = np.asarray(r)
        if np.any(r <= 0):
            raise PoleExclusionError(float(np.min(r)))

    def metric(self, r, theta):
        f, _, _ = self.profile(r)
        shape = np.broadcast(r, theta).shape
        g = np.zeros((2, 2) + shape)
        g[0, 0] = 1.0
        g[1, 1] = f**2
        return g

    def frame(self, r, theta):
        f, _, _ = self.profile(r)
        shape = np.broadcast(r, theta).shape
        e = np.zeros((2, 2) + shape)
        e[0, 0] = 1.0
        e[1, 1] = 1.0 / f
        return e

    def christoffel(self, r, theta):
        f, df, _ = self.profile(r)
        shape = np.broadcast(r, theta).shape
        gamma = np.zeros((2, 2, 2) + shape)
        gamma[0, 1, 1] = -f * df
        gamma[1, 0, 1] = gamma[1, 1, 0] = df / f
        return gamma

    def frame_connection(self, r, theta):
        f, df, _ = self.profile(r)
        shape = np.broadcast(r, theta).shape
        w = np.zeros((2, 2, 2) + shape)
        w[1, 0, 1] = df / f
        w[1, 1, 0] = -df / f
        return w

    def gauss_curvature(self, r, theta):
        f, _, d2f = self.profile(r)
        return -d2f / f * np.ones(np.broadcast(r, theta).shape)

    def sectional_lower_bound(self, grid: Grid) -> float:
        r, theta = grid.coordinates()
        return float(np.min(self.gauss_curvature(r, theta)))

    def distance_to_pole(self, r, theta=None):
        return np.asarray(r, dtype=np.float64)

    def volume_density(self, r, theta):
        f, _, _ = self.profile(r)
        return f * np.ones(np.broadcast(r, theta).shape)


class EuclideanPolar(PolarBase):
    key = "euclidean-polar"

    def profile(self, r):
        r = np.asarray(r, dtype=np.float64)
        return r, np.ones_like(r), np.zeros_like(r)

    def sectional_lower_bound(self, grid):
        return 0.0


class HyperbolicPolar(PolarBase):
    key = "hyperbolic-polar"

    def profile(self, r):
        r = np.asarray(r, dtype=np.float64)
        return np.sinh(r), np.cosh(r), np.sinh(r)

    def gauss_curvature(self, r, theta):
        return -np.ones(np.broadcast(r, theta).shape)

    def sectional_lower_bound(self, grid):
        return -1.0


class RotationallySymmetric(PolarBase):
    """
    Rotationally symmetric surface with profile f. The profile is either the comparison
    function s_k of a curvature k <= 0 or a tabulated two-column CSV (r, f) interpolated by a
    cubic spline with f(0) = 0 and f'(0) = 1 enforced.
    """

    key = "rotationally-symmetric"

    def __init__(
        self,
        *,
        curvature: Optional[float] = None,
        path: Optional[str] = None,
        r: Optional[Sequence[float]] = None,
        values: Optional[Sequence[float]] = None,
    ):
        self.curvature = curvature
        self.path = path
        self._spline = None
        if curvature is None:
            if path is not None:
                table = load_radial_table(path)
                r, values = table[:, 0], table[:, 1]
            if r is None or values is None:
                raise ValueError("rotationally-symmetric needs `curvature` or a tabulated profile")
            self._r = np.asarray(r, dtype=np.float64)
            self._values = np.asarray(values, dtype=np.float64)
            self._spline = _radial_spline(self._r, self._values, slope_at_zero=1.0)
            self._r_max = float(np.max(r))
            f0 = float(self._spline(0.0))
            df0 = float(self._spline(0.0, 1))
            if abs(f0) > 1e-8 or abs(df0 - 1.0) > 1e-6:
                raise ValueError(
                    f"profile must satisfy f(0)=0, f'(0)=1, got f(0)={f0}, f'(0)={df0}"
                )
        elif curvature > 0:
            raise ValueError(f"non-compact profiles need curvature <= 0, got {curvature}")

    def profile(self, r):
        r = np.asarray(r, dtype=np.float64)
        if self._spline is None:
            s, c = comparison_fn(self.curvature, r)
            return np.asarray(s), np.asarray(c), -self.curvature * np.asarray(s)
        if np.any(r > self._r_max * (1 + 1e-12)):
            raise ValueError(f"radius {float(np.max(r))} beyond the tabulated range {self._r_max}")
        return self._spline(r), self._spline(r, 1), self._spline(r, 2)

    def to_config(self):
        if self._spline is None:
            return {"kind": self.key, "curvature": self.curvature}
        if self.path is not None:
            return {"kind": self.key, "path": self.path}
        return {"kind": self.key, "r": self._r.tolist(), "values": self._values.tolist()}


def load_radial_table(path: str) -> np.ndarray:
    """Read a two-column (r, value) CSV, with or without a header row."""
    path = Path(path)
    try:
        table = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError:
        table = np.loadtxt(path, delimiter=",", ndmin=2, skiprows=1)
    if table.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns (r, value), got {table.shape[1]}")
    order = np.argsort(table[:, 0])
    logger.debug(f"Loaded {len(table)} radial samples from {path}")
    return table[order]


def _radial_spline(r: np.ndarray, values: np.ndarray, slope_at_zero: float) -> CubicSpline:
    if r[0] != 0.0:
        raise ValueError("tabulated radial profiles must start at r=0")
    return CubicSpline(r, values, bc_type=((1, slope_at_zero), "not-a-knot"))


BASE_CATALOG = {
    FlatCircle.key: FlatCircle,
    FlatTorus.key: FlatTorus,
    EuclideanPolar.key: EuclideanPolar,
    HyperbolicPolar.key: HyperbolicPolar,
    RotationallySymmetric.key: RotationallySymmetric,
}
