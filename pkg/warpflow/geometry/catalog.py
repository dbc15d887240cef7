from __future__ import annotations

from typing import Any
from typing import Dict
from typing import Mapping
from typing import Union

from omegaconf import DictConfig

from warpflow.geometry.base import BASE_CATALOG
from warpflow.geometry.base import BaseManifold
from warpflow.geometry.warp import WARP_CATALOG
from warpflow.geometry.warp import WarpFactor
from warpflow.utils.functional import maybe_instantiate
from warpflow.utils.functional import to_container


def _build(conf: Union[Mapping, DictConfig, Any], catalog: Dict[str, type], what: str):
    if not isinstance(conf, (Mapping, DictConfig)):
        return conf
    if "_target_" in conf:
        return maybe_instantiate(conf)
    params = to_container(conf)
    kind = params.pop("kind", None)
    if kind not in catalog:
        raise ValueError(f"Unknown {what} kind: {kind}. Known kinds: {sorted(catalog)}")
    return catalog[kind](**params)


def build_base(conf) -> BaseManifold:
    return _build(conf, BASE_CATALOG, "base")


def build_warp(conf) -> WarpFactor:
    return _build(conf, WARP_CATALOG, "warp")


def build_pair(base_conf, warp_conf):
    base = build_base(base_conf)
    warp = build_warp(warp_conf)
    warp.check_compatible(base)
    return base, warp
