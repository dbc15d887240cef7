from __future__ import annotations

import abc
from typing import Any
from typing import Dict
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np

from warpflow.geometry.base import _radial_spline
from warpflow.geometry.base import BaseManifold
from warpflow.geometry.base import load_radial_table
from warpflow.geometry.base import PolarBase
from warpflow.geometry.grid import Chart
from warpflow.utils.exceptions import IncompatibleCatalogError
from warpflow.utils.exceptions import InvalidWarpFactorError


class WarpFactor:
    """Positive function phi on the base, with its frame gradient and covariant Hessian."""

    key: str = "warp"

    def check_compatible(self, base: BaseManifold) -> None:
        pass

    @abc.abstractmethod
    def value(self, base: BaseManifold, *coords: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @abc.abstractmethod
    def gradient(self, base: BaseManifold, *coords: np.ndarray) -> np.ndarray:
        """Frame components phi_i = e^_i(phi), shape (n, ...)."""
        raise NotImplementedError

    @abc.abstractmethod
    def hessian(self, base: BaseManifold, *coords: np.ndarray) -> np.ndarray:
        """nabla^2 phi (e^_i, e^_j), shape (n, n, ...)."""
        raise NotImplementedError

    def to_config(self) -> Dict[str, Any]:
        return {"kind": self.key}

    def checked_value(self, base: BaseManifold, *coords: np.ndarray) -> np.ndarray:
        phi = self.value(base, *coords)
        if not np.all(phi > 0):
            node = np.unravel_index(np.argmin(phi), np.shape(phi))
            raise InvalidWarpFactorError(float(np.min(phi)), tuple(int(i) for i in node))
        return phi


def _shape(*coords) -> Tuple[int, ...]:
    return np.broadcast(*coords).shape


class ConstantOne(WarpFactor):
    """phi = 1: the Riemannian product M x R."""

    key = "constant-one"

    def value(self, base, *coords):
        return np.ones(_shape(*coords))

    def gradient(self, base, *coords):
        return np.zeros((base.dimension,) + _shape(*coords))

    def hessian(self, base, *coords):
        return np.zeros((base.dimension, base.dimension) + _shape(*coords))


class TorusBump(WarpFactor):
    """phi = a + b sin(k x_axis + phase) on a periodic Cartesian base."""

    key = "torus-bump"

    def __init__(
        self,
        a: float = 1.5,
        b: float = 0.5,
        axis: int = 0,
        wavenumber: int = 1,
        phase: float = 0.0,
    ):
        if a <= abs(b):
            raise InvalidWarpFactorError(a - abs(b))
        self.a = float(a)
        self.b = float(b)
        self.axis = int(axis)
        self.wavenumber = int(wavenumber)
        self.phase = float(phase)

    def check_compatible(self, base):
        if base.chart != Chart.cartesian:
            raise IncompatibleCatalogError(f"{self.key} needs a periodic Cartesian base")
        if self.axis >= base.dimension:
            raise IncompatibleCatalogError(
                f"{self.key} axis {self.axis} out of range for dimension {base.dimension}"
            )

    def _angle(self, coords):
        return self.wavenumber * coords[self.axis] + self.phase

    def value(self, base, *coords):
        return self.a + self.b * np.sin(self._angle(coords)) * np.ones(_shape(*coords))

    def gradient(self, base, *coords):
        grad = np.zeros((base.dimension,) + _shape(*coords))
        grad[self.axis] = self.b * self.wavenumber * np.cos(self._angle(coords))
        return grad

    def hessian(self, base, *coords):
        hess = np.zeros((base.dimension, base.dimension) + _shape(*coords))
        hess[self.axis, self.axis] = -self.b * self.wavenumber**2 * np.sin(self._angle(coords))
        return hess

    def to_config(self):
        return {
            "kind": self.key,
            "a": self.a,
            "b": self.b,
            "axis": self.axis,
            "wavenumber": self.wavenumber,
            "phase": self.phase,
        }


class RadialWarp(WarpFactor):
    """
    Radial warp phi(r) on a polar base. In the frame (d_r, (1/f) d_theta) the Hessian is
    diag(phi'', (f'/f) phi').
    """

    def check_compatible(self, base):
        if not isinstance(base, PolarBase):
            raise IncompatibleCatalogError(f"{self.key} needs a pole-based (polar) base")

    @abc.abstractmethod
    def radial(self, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        raise NotImplementedError

    def value(self, base, r, theta=0.0):
        phi, _, _ = self.radial(r)
        return phi * np.ones(_shape(r, theta))

    def gradient(self, base, r, theta=0.0):
        _, dphi, _ = self.radial(r)
        grad = np.zeros((2,) + _shape(r, theta))
        grad[0] = dphi
        return grad

    def hessian(self, base, r, theta=0.0):
        _, dphi, d2phi = self.radial(r)
        f, df, _ = base.profile(r)
        hess = np.zeros((2, 2) + _shape(r, theta))
        hess[0, 0] = d2phi
        hess[1, 1] = df / f * dphi
        return hess


class CoshRadial(RadialWarp):
    """phi = cosh(rate * r); with rate 1 over the hyperbolic plane the ambient space is H^3."""

    key = "cosh-r"

    def __init__(self, rate: float = 1.0):
        self.rate = float(rate)

    def radial(self, r):
        r = np.asarray(r, dtype=np.float64)
        a = self.rate
        return np.cosh(a * r), a * np.sinh(a * r), a**2 * np.cosh(a * r)

    def to_config(self):
        return {"kind": self.key, "rate": self.rate}


class TabulatedRadial(RadialWarp):
    """Radial warp from a two-column CSV (r, phi), cubic spline with phi'(0) = 0."""

    key = "tabulated-radial"

    def __init__(
        self,
        path: Optional[str] = None,
        r: Optional[Sequence[float]] = None,
        values: Optional[Sequence[float]] = None,
    ):
        self.path = path
        if path is not None:
            table = load_radial_table(path)
            r, values = table[:, 0], table[:, 1]
        if r is None or values is None:
            raise ValueError("tabulated-radial needs `path` or explicit `r`/`values` samples")
        values = np.asarray(values, dtype=np.float64)
        if np.any(values <= 0):
            raise InvalidWarpFactorError(float(values.min()))
        self._r = np.asarray(r, dtype=np.float64)
        self._values = values
        self._spline = _radial_spline(self._r, values, slope_at_zero=0.0)
        self._r_max = float(self._r.max())

    @classmethod
    def from_function(cls, fn, r_max: float, samples: int = 2001) -> "TabulatedRadial":
        r = np.linspace(0.0, r_max, samples)
        return cls(r=r, values=fn(r))

    def radial(self, r):
        r = np.asarray(r, dtype=np.float64)
        if np.any(r > self._r_max * (1 + 1e-12)):
            raise ValueError(f"radius {float(np.max(r))} beyond the tabulated range {self._r_max}")
        return self._spline(r), self._spline(r, 1), self._spline(r, 2)

    def to_config(self):
        if self.path is not None:
            return {"kind": self.key, "path": self.path}
        return {"kind": self.key, "r": self._r.tolist(), "values": self._values.tolist()}


WARP_CATALOG = {
    ConstantOne.key: ConstantOne,
    TorusBump.key: TorusBump,
    CoshRadial.key: CoshRadial,
    TabulatedRadial.key: TabulatedRadial,
}
