"""Comparison functions s_k, c_k solving s'' + k s = 0 with s(0) = 0, s'(0) = 1 and c = s'."""
from __future__ import annotations

from typing import Tuple
from typing import Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


def comparison_fn(k: float, t: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """
    Evaluate the comparison pair (s_k(t), c_k(t)).

    The three branches are exact closed forms; for k -> 0 both trigonometric and hyperbolic
    branches converge to (t, 1) without cancellation since sin(x)/sqrt(k) ~ t.
    """
    t = np.asarray(t, dtype=np.float64)
    if k > 0:
        rk = np.sqrt(k)
        s, c = np.sin(rk * t) / rk, np.cos(rk * t)
    elif k < 0:
        rk = np.sqrt(-k)
        s, c = np.sinh(rk * t) / rk, np.cosh(rk * t)
    else:
        s, c = t.copy(), np.ones_like(t)
    if s.ndim == 0:
        return float(s), float(c)
    return s, c


def comparison_ratio(k: float, t: ArrayLike) -> ArrayLike:
    """Principal curvature k s_k / c_k of the level sets of the distance to a totally geodesic
    hypersurface in a space of constant curvature k (tanh for k = -1)."""
    s, c = comparison_fn(k, t)
    return -k * np.asarray(s) / np.asarray(c) if k != 0 else np.zeros_like(np.asarray(t))
