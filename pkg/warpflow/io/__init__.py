from .snapshot import load_snapshot  # noqa: F401
from .snapshot import save_snapshot  # noqa: F401
from .timeseries import write_rows  # noqa: F401
from .timeseries import write_timeseries  # noqa: F401
