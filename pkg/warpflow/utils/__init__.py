from .functional import maybe_instantiate  # noqa: F401
from .functional import to_jsonable  # noqa: F401
