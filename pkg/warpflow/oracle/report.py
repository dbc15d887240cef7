from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Dict
from typing import Optional


@dataclass
class CheckResult:
    """Outcome of one oracle check: the worst error and the tolerance it is held to."""

    name: str
    error: float
    tolerance: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.error):
            return False
        return self.tolerance is None or self.error <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "error": self.error,
            "tolerance": self.tolerance,
            "passed": self.passed,
            **self.details,
        }
