from __future__ import annotations

from typing import Sequence

import numpy as np

from warpflow.oracle.report import CheckResult

ORDER_FLOOR = 1.5


def observed_order(errors: Sequence[float], ratio: float = 2.0) -> np.ndarray:
    """log(e_k / e_{k+1}) / log(ratio) for successive refinements by `ratio`."""
    errors = np.asarray(errors, dtype=np.float64)
    if len(errors) < 2:
        raise ValueError("an observed order needs at least two refinement levels")
    if np.any(errors <= 0):
        raise ValueError(f"refinement errors must be positive, got {errors.tolist()}")
    return np.log(errors[:-1] / errors[1:]) / np.log(ratio)


def order_check(
    name: str, errors: Sequence[float], ratio: float = 2.0, floor: float = ORDER_FLOOR
) -> CheckResult:
    """Fails when the last observed order falls below the floor. The reported error is the order
    shortfall, zero when the floor is met."""
    orders = observed_order(errors, ratio)
    last = float(orders[-1])
    return CheckResult(
        name=name,
        error=max(0.0, floor - last),
        tolerance=0.0,
        details={"errors": [float(e) for e in errors], "orders": orders.tolist(), "floor": floor},
    )
