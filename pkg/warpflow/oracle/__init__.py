from .conformance import ConformanceSuite  # noqa: F401
from .conformance import run_verification  # noqa: F401
from .first_variation import first_variation_check  # noqa: F401
from .identities import gradient_identity_check  # noqa: F401
from .identities import laplacian_identity_check  # noqa: F401
from .refinement import observed_order  # noqa: F401
from .report import CheckResult  # noqa: F401
from .residual import v_evolution_residual  # noqa: F401
from .riemann import fd_riemann_check  # noqa: F401
