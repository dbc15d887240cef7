from __future__ import annotations

from typing import Tuple
from typing import Union

import numpy as np

from warpflow.geometry.base import BaseManifold
from warpflow.geometry.base import HyperbolicPolar
from warpflow.geometry.warp import CoshRadial
from warpflow.geometry.warp import WarpFactor


def has_exact_distance(base: BaseManifold, warp: WarpFactor) -> bool:
    """The hyperbolic plane warped by cosh r is the space form H^3, where the distance to the
    slice u = 0 has a closed form."""
    return isinstance(base, HyperbolicPolar) and isinstance(warp, CoshRadial) and warp.rate == 1.0


def distance_to_slice(
    base: BaseManifold, warp: WarpFactor, x, u: Union[float, np.ndarray]
) -> Tuple[np.ndarray, bool]:
    """
    Distance from (x, u) to the totally geodesic slice M x {0}.

    Exact in H^3 (sinh l = phi(x) |sinh u|); otherwise the length phi(x)|u| of the vertical
    segment, which bounds the distance from above.
    """
    phi = warp.value(base, *x)
    u = np.abs(np.asarray(u, dtype=np.float64))
    if has_exact_distance(base, warp):
        return np.arcsinh(phi * np.sinh(u)), True
    return phi * u, False
