from __future__ import annotations

from dataclasses import dataclass
from typing import Callable
from typing import Tuple

import numpy as np

from warpflow.counterflow.charts import equidistant_height
from warpflow.counterflow.charts import from_isothermal
from warpflow.counterflow.charts import isothermal
from warpflow.utils.exceptions import InvalidAxisError

SPACING_BOUNDS = (0.5, 2.0)


@dataclass(frozen=True)
class ProfileCurve:
    """
    Polyline (r_i, u_i) in the orbit half-plane generating a rotationally symmetric hypersurface
    of multiplicity n. Endpoints with r = 0 lie on the axis and are closed by reflection; any
    other endpoint is held fixed.
    """

    r: np.ndarray
    u: np.ndarray
    n: int = 2
    t: float = 0.0

    def __post_init__(self):
        r = np.array(self.r, dtype=np.float64)
        u = np.array(self.u, dtype=np.float64)
        if r.ndim != 1 or r.shape != u.shape:
            raise ValueError(f"profile nodes must be two 1-d arrays, got {r.shape} and {u.shape}")
        if len(r) < 3:
            raise ValueError(f"a profile curve needs at least 3 nodes, got {len(r)}")
        if np.any(r < 0):
            raise ValueError(f"profile nodes must satisfy r >= 0, min r = {r.min()}")
        if np.any(r[1:-1] == 0):
            node = int(np.flatnonzero(r[1:-1] == 0)[0]) + 1
            raise InvalidAxisError(f"interior node {node} lies on the axis r = 0")
        if self.n < 1:
            raise ValueError(f"rotation multiplicity must be >= 1, got {self.n}")
        r.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "u", u)

    def __len__(self):
        return len(self.r)

    @property
    def on_axis(self) -> Tuple[bool, bool]:
        return bool(self.r[0] == 0.0), bool(self.r[-1] == 0.0)

    @property
    def w(self) -> np.ndarray:
        return isothermal(self.r)

    def evolve(self, r: np.ndarray, u: np.ndarray, t: float) -> "ProfileCurve":
        return ProfileCurve(r=r, u=u, n=self.n, t=t)

    def segment_lengths(self) -> np.ndarray:
        """q-lengths of the segments, cosh(r_mid) times the isothermal chord."""
        w = self.w
        chord = np.hypot(np.diff(w), np.diff(self.u))
        return np.cosh(0.5 * (self.r[1:] + self.r[:-1])) * chord

    @property
    def length(self) -> float:
        return float(np.sum(self.segment_lengths()))

    def spacing_ok(self) -> bool:
        seg = self.segment_lengths()
        target = seg.sum() / len(seg)
        lo, hi = SPACING_BOUNDS
        return bool(np.all(seg >= lo * target) and np.all(seg <= hi * target))

    def resampled(self) -> "ProfileCurve":
        """Same node count, uniform in q-arclength, linear in the isothermal chart."""
        s = np.concatenate([[0.0], np.cumsum(self.segment_lengths())])
        target = np.linspace(0.0, s[-1], len(s))
        w = np.interp(target, s, self.w)
        u = np.interp(target, s, self.u)
        r = from_isothermal(w)
        r[0], r[-1] = self.r[0], self.r[-1]
        u[0], u[-1] = self.u[0], self.u[-1]
        r[1:-1] = np.maximum(r[1:-1], np.finfo(float).tiny)
        return self.evolve(r, u, self.t)

    def self_intersects(self) -> bool:
        """Proper crossing of two non-adjacent segments, in the isothermal chart."""
        p = np.stack([self.w, self.u], axis=-1)
        a, b = p[:-1], p[1:]
        m = len(a)
        i, j = np.triu_indices(m, k=2)
        a1, b1, a2, b2 = a[i], b[i], a[j], b[j]

        def orient(p0, p1, p2):
            return np.sign(
                (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
                - (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0])
            )

        crossing = (orient(a1, b1, a2) * orient(a1, b1, b2) < 0) & (
            orient(a2, b2, a1) * orient(a2, b2, b1) < 0
        )
        return bool(np.any(crossing))

    @classmethod
    def from_graph(
        cls,
        height: Callable[[np.ndarray], np.ndarray],
        r_max: float,
        nodes: int,
        n: int = 2,
        tip_radius: float = 0.0,
    ) -> "ProfileCurve":
        """
        Graph u = height(r) over [0, r_max], oriented away from the axis. A graph with nonzero
        slope at r = 0 generates a cone; with tip_radius > 0 the part over r < tip_radius is
        replaced by the paraboloid matching height and slope at tip_radius.
        """
        r = np.linspace(0.0, r_max, nodes)
        if tip_radius > 0:
            height = paraboloid_cap(height, tip_radius)
        return cls(r=r, u=height(r), n=n).resampled()

    @classmethod
    def geodesic_sphere(cls, rho: float, nodes: int, n: int = 2) -> "ProfileCurve":
        """Sphere of radius rho about (0, 0), from the bottom pole to the top pole."""
        angle = np.linspace(-0.5 * np.pi, 0.5 * np.pi, nodes)
        # geodesic polar coordinates about the origin, projected to (r, u)
        r = np.arcsinh(np.sinh(rho) * np.cos(angle))
        u = np.arctanh(np.tanh(rho) * np.sin(angle))
        r[0] = r[-1] = 0.0
        return cls(r=r, u=u, n=n)

    @classmethod
    def equidistant(
        cls, ell: float, r_max: float, nodes: int, n: int = 2, toward_axis: bool = False
    ) -> "ProfileCurve":
        r = np.linspace(0.0, r_max, nodes)
        if toward_axis:
            r = r[::-1]
        return cls(r=r, u=equidistant_height(r, ell), n=n)


def paraboloid_cap(
    height: Callable[[np.ndarray], np.ndarray], radius: float
) -> Callable[[np.ndarray], np.ndarray]:
    """C^1 replacement of height over [0, radius] by a + k r^2, flat on the axis."""
    h = 1e-6 * radius
    value = float(height(np.array([radius]))[0])
    slope = float(np.diff(height(np.array([radius - h, radius + h])))[0]) / (2 * h)
    k = 0.5 * slope / radius
    a = value - k * radius**2

    def capped(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        return np.where(r < radius, a + k * r**2, height(r))

    return capped
