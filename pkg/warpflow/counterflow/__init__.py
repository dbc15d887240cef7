from .curvature import generated_mean_curvature  # noqa: F401
from .curve import ProfileCurve  # noqa: F401
from .flow import graph_measures  # noqa: F401
from .flow import run_profile  # noqa: F401
from .flow import step_profile  # noqa: F401
from .scenarios import run_counterexample  # noqa: F401
from .scenarios import SCENARIOS  # noqa: F401
