from .ambient import ambient_sectional  # noqa: F401
from .ambient import frame_curvature_tensor  # noqa: F401
from .base import BASE_CATALOG  # noqa: F401
from .base import BaseManifold  # noqa: F401
from .base import EuclideanPolar  # noqa: F401
from .base import FlatCircle  # noqa: F401
from .base import FlatTorus  # noqa: F401
from .base import HyperbolicPolar  # noqa: F401
from .base import RotationallySymmetric  # noqa: F401
from .comparison import comparison_fn  # noqa: F401
from .constants import estimate_constants  # noqa: F401
from .constants import EstimateConstants  # noqa: F401
from .distance import distance_to_slice  # noqa: F401
from .grid import Chart  # noqa: F401
from .grid import Grid  # noqa: F401
from .warp import ConstantOne  # noqa: F401
from .warp import CoshRadial  # noqa: F401
from .warp import TabulatedRadial  # noqa: F401
from .warp import TorusBump  # noqa: F401
from .warp import WARP_CATALOG  # noqa: F401
from .warp import WarpFactor  # noqa: F401
