from numbers import Number
from typing import Any
from typing import Dict
from typing import Union

import numpy as np
from hydra.utils import instantiate
from omegaconf import DictConfig
from omegaconf import OmegaConf


def maybe_instantiate(conf_or_obj: Union[Any, DictConfig], **kwargs):
    if isinstance(conf_or_obj, (DictConfig, dict)):
        return instantiate(conf_or_obj, **kwargs)

    return conf_or_obj


def to_container(conf: Union[DictConfig, Dict, None]) -> Dict:
    if conf is None:
        return {}
    if isinstance(conf, DictConfig):
        return OmegaConf.to_container(conf, resolve=True)
    return dict(conf)


def to_jsonable(x: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into JSON-friendly values."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, Number):
        x = float(x)
        if np.isnan(x):
            return "nan"
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x
