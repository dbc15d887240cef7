from .fields import compute_fields  # noqa: F401
from .fields import compute_gradient_v  # noqa: F401
from .fields import GraphFields  # noqa: F401
from .fields import mean_curvature  # noqa: F401
from .fields import SampledGeometry  # noqa: F401
from .fields import second_fundamental_form  # noqa: F401
from .flow import FlowConfig  # noqa: F401
from .flow import run_flow  # noqa: F401
from .flow import Scheme  # noqa: F401
from .flow import step_flow  # noqa: F401
from .flow import Trajectory  # noqa: F401
from .state import BoundaryPolicy  # noqa: F401
from .state import GraphState  # noqa: F401
from .timestep import AutoTimeStep  # noqa: F401
