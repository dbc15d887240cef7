from .config import parse_config  # noqa: F401
from .config import RunConfig  # noqa: F401
from .initial import initial_height  # noqa: F401
from .initial import INITIAL_DATA  # noqa: F401
from .pipeline import ExitCode  # noqa: F401
from .pipeline import run_scenario  # noqa: F401
from .pipeline import run_sweep  # noqa: F401
