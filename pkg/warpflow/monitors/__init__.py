from .base import BoundRecord  # noqa: F401
from .base import BoundReport  # noqa: F401
from .base import classify_violation  # noqa: F401
from .base import discretization_tolerance  # noqa: F401
from .base import Monitor  # noqa: F401
from .bounds import decay_check  # noqa: F401
from .bounds import frakg_bound_check  # noqa: F401
from .bounds import gradient_bound_check  # noqa: F401
from .bounds import graph_property_check  # noqa: F401
from .bounds import regularization_check  # noqa: F401
from .factory import AutoMonitor  # noqa: F401
from .factory import MONITORS  # noqa: F401
from .residual import v_residual_check  # noqa: F401
