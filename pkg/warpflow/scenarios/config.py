"""
Scenario documents: parsing and validation.

A scenario document is either YAML or flat `dotted.key = value` lines, both loaded with
OmegaConf. Validation runs to the end and collects every issue before raising a single
`ConfigError`.
"""
from __future__ import annotations

import copy
import difflib
import re
from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Dict
from typing import List
from typing import Mapping
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import yaml
from omegaconf import DictConfig
from omegaconf import OmegaConf
from omegaconf.errors import OmegaConfBaseException

from warpflow.counterflow.scenarios import SCENARIOS
from warpflow.geometry.base import BASE_CATALOG
from warpflow.geometry.base import PolarBase
from warpflow.geometry.catalog import build_base
from warpflow.geometry.constants import EstimateConstants
from warpflow.geometry.warp import WARP_CATALOG
from warpflow.graphflow.flow import DEFAULT_SAMPLES
from warpflow.graphflow.flow import Scheme
from warpflow.graphflow.timestep import MAX_CFL_FRACTION
from warpflow.monitors.factory import MONITORS
from warpflow.scenarios.initial import INITIAL_DATA
from warpflow.utils.exceptions import ConfigError
from warpflow.utils.exceptions import ConfigIssue

MIN_RESOLUTION = 16
DEFAULT_MONITORS = ("graph_property", "gradient_bound", "frakg_bound")
_REQUIRED = object()
_DOTLIST_LINE = re.compile(r"^\s*[A-Za-z_][\w.\-]*\s*=")
_NUMBER = (int, float)


@dataclass(frozen=True)
class Field:
    types: Tuple[type, ...]
    default: Any = None

    @property
    def required(self) -> bool:
        return self.default is _REQUIRED


SCHEMA: Dict[str, Any] = {
    "name": Field((str,), "scenario"),
    "base": Field((dict,), _REQUIRED),
    "warp": Field((dict,), {"kind": "constant-one"}),
    "grid": {
        "resolution": Field((list,), _REQUIRED),
        "truncation_radius": Field(_NUMBER),
    },
    "initial": Field((dict,), _REQUIRED),
    "flow": {
        "scheme": Field((str,), Scheme.euler.value),
        "horizon": Field(_NUMBER, _REQUIRED),
        "cadence": Field(_NUMBER),
        "stop_tolerance": Field(_NUMBER),
        "dt": {
            "mode": Field((str,), "cfl"),
            "fraction": Field(_NUMBER, 0.4),
            "dt": Field(_NUMBER),
        },
    },
    "monitors": {
        "enabled": Field((list,), list(DEFAULT_MONITORS)),
        "options": Field((dict,), {}),
        "constant_offsets": Field((dict,), {}),
        "tolerance_constant": Field(_NUMBER, 1.0),
        "refine": Field((bool,), True),
        "v0_bounded": Field((bool,), True),
        "gamma": Field(_NUMBER, 0.5),
    },
    "output": {
        "dir": Field((str,)),
        "snapshots": Field((bool,), True),
        "verbose": Field((bool,), False),
    },
    "restart": Field((str,)),
    "seed": Field((int,)),
    "counterexample": Field((dict,)),
}

# only required when the document describes a graph flow
_FLOW_ONLY = {"base", "grid.resolution", "initial", "flow.horizon"}


@dataclass
class RunConfig:
    """A validated scenario: everything `run_scenario` needs, with defaults filled in."""

    name: str
    base: Dict[str, Any]
    warp: Dict[str, Any]
    resolution: Tuple[int, ...]
    truncation_radius: Optional[float]
    initial: Dict[str, Any]
    horizon: float
    cadence: float
    scheme: str = Scheme.euler.value
    dt: Dict[str, Any] = field(default_factory=lambda: {"mode": "cfl", "fraction": 0.4})
    stop_tolerance: Optional[float] = None
    monitors: List[str] = field(default_factory=lambda: list(DEFAULT_MONITORS))
    monitor_options: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    constant_offsets: Dict[str, float] = field(default_factory=dict)
    tolerance_constant: float = 1.0
    refine: bool = True
    v0_bounded: bool = True
    gamma: float = 0.5
    output_dir: Optional[str] = None
    snapshots: bool = True
    verbose: bool = False
    restart: Optional[str] = None
    seed: Optional[int] = None
    counterexample: Optional[Dict[str, Any]] = None

    @property
    def is_counterexample(self) -> bool:
        return self.counterexample is not None

    def to_dict(self) -> Dict[str, Any]:
        """The document this config parses from, defaults included."""
        return {
            "name": self.name,
            "base": dict(self.base),
            "warp": dict(self.warp),
            "grid": {
                "resolution": list(self.resolution),
                "truncation_radius": self.truncation_radius,
            },
            "initial": dict(self.initial),
            "flow": {
                "scheme": self.scheme,
                "horizon": self.horizon,
                "cadence": self.cadence,
                "stop_tolerance": self.stop_tolerance,
                "dt": dict(self.dt),
            },
            "monitors": {
                "enabled": list(self.monitors),
                "options": {k: dict(v) for k, v in self.monitor_options.items()},
                "constant_offsets": dict(self.constant_offsets),
                "tolerance_constant": self.tolerance_constant,
                "refine": self.refine,
                "v0_bounded": self.v0_bounded,
                "gamma": self.gamma,
            },
            "output": {
                "dir": self.output_dir,
                "snapshots": self.snapshots,
                "verbose": self.verbose,
            },
            "restart": self.restart,
            "seed": self.seed,
            "counterexample": dict(self.counterexample) if self.counterexample else None,
        }

    def override(self, dotlist: Sequence[str]) -> "RunConfig":
        """A new config with `key=value` assignments applied and validated again."""
        merged = OmegaConf.merge(OmegaConf.create(self.to_dict()), _parse_dotlist(dotlist))
        return config_from_dict(OmegaConf.to_container(merged, resolve=True))


def _content_lines(text: str) -> List[str]:
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _is_dotlist(text: str) -> bool:
    lines = _content_lines(text)
    return bool(lines) and all(_DOTLIST_LINE.match(ln) for ln in lines)


def _parse_dotlist(lines: Sequence[str]) -> DictConfig:
    assignments = []
    for line in lines:
        key, _, value = line.partition("=")
        assignments.append(f"{key.strip()}={value.strip()}")
    return OmegaConf.from_dotlist(assignments)


def load_document(text: str, overrides: Sequence[str] = ()) -> Dict[str, Any]:
    """Load a YAML or dotlist document, apply overrides and resolve interpolations."""
    try:
        if _is_dotlist(text):
            conf = _parse_dotlist(_content_lines(text))
        else:
            conf = OmegaConf.create(text or "{}")
        if overrides:
            conf = OmegaConf.merge(conf, _parse_dotlist(overrides))
        data = OmegaConf.to_container(conf, resolve=True)
    except (OmegaConfBaseException, yaml.YAMLError, ValueError) as err:
        raise ConfigError([ConfigIssue("<document>", f"unreadable document: {err}")]) from err
    if not isinstance(data, dict):
        raise ConfigError([ConfigIssue("<document>", "the document must be a mapping")])
    return data


def parse_config(text: str, overrides: Sequence[str] = ()) -> RunConfig:
    """
    Parse and validate a scenario document.

    Raises
    ------
    ConfigError
        Holding every issue found, each with its dotted path and a hint where one exists.
    """
    return config_from_dict(load_document(text, overrides))


def _type_name(types: Tuple[type, ...]) -> str:
    names = {dict: "mapping", list: "list", str: "string", bool: "boolean", int: "integer"}
    return " or ".join(names.get(t, t.__name__) for t in types)


def _example(path: str, default: Any) -> Optional[str]:
    if default is None or default is _REQUIRED:
        return None
    return f"e.g. {path}={default!r}"


def _matches(value: Any, types: Tuple[type, ...]) -> bool:
    if isinstance(value, bool):
        return bool in types
    return isinstance(value, types)


def _walk(
    schema: Dict[str, Any],
    data: Mapping[str, Any],
    prefix: str,
    issues: List[ConfigIssue],
    optional: set,
) -> Dict[str, Any]:
    out = {}
    for key in data:
        if key not in schema:
            close = difflib.get_close_matches(str(key), list(schema), n=1)
            hint = f"did you mean '{prefix}{close[0]}'?" if close else None
            known = ", ".join(sorted(schema))
            issues.append(ConfigIssue(f"{prefix}{key}", f"unknown key (known: {known})", hint))
    for key, entry in schema.items():
        path = f"{prefix}{key}"
        value = data.get(key)
        if isinstance(entry, dict):
            if value is None:
                value = {}
            if not isinstance(value, Mapping):
                issues.append(ConfigIssue(path, "expected a mapping"))
                value = {}
            out[key] = _walk(entry, value, f"{path}.", issues, optional)
            continue
        if value is None:
            if entry.required and path not in optional:
                issues.append(ConfigIssue(path, "missing required field"))
                out[key] = None
            else:
                default = None if entry.required else entry.default
                out[key] = copy.deepcopy(default)
            continue
        if not _matches(value, entry.types):
            issues.append(
                ConfigIssue(
                    path,
                    f"expected {_type_name(entry.types)}, got {type(value).__name__}",
                    _example(path, entry.default),
                )
            )
            value = None
        out[key] = value
    return out


def _check_catalog_entry(
    conf: Optional[Mapping], catalog: Mapping, path: str, issues: List[ConfigIssue]
) -> None:
    if conf is None or "_target_" in conf:
        return
    kind = conf.get("kind")
    if kind is None:
        hint = f"one of {sorted(catalog)}"
        issues.append(ConfigIssue(f"{path}.kind", "missing required field", hint))
    elif kind not in catalog:
        close = difflib.get_close_matches(str(kind), list(catalog), n=1)
        hint = f"did you mean '{close[0]}'?" if close else f"one of {sorted(catalog)}"
        issues.append(ConfigIssue(f"{path}.kind", f"unknown catalog key '{kind}'", hint))


def _check_flow(doc: Dict[str, Any], issues: List[ConfigIssue]) -> None:
    base_conf = doc["base"]
    _check_catalog_entry(base_conf, BASE_CATALOG, "base", issues)
    _check_catalog_entry(doc["warp"], WARP_CATALOG, "warp", issues)
    _check_catalog_entry(doc["initial"], INITIAL_DATA, "initial", issues)

    base = None
    if base_conf is not None and not any(i.path.startswith("base") for i in issues):
        try:
            base = build_base(base_conf)
        except Exception as err:
            issues.append(ConfigIssue("base", f"cannot build the base: {err}"))

    grid = doc["grid"]
    resolution = grid["resolution"]
    if resolution is not None:
        for i, n in enumerate(resolution):
            if isinstance(n, bool) or not isinstance(n, int):
                issues.append(ConfigIssue(f"grid.resolution[{i}]", "expected an integer"))
            elif n < MIN_RESOLUTION:
                issues.append(
                    ConfigIssue(
                        f"grid.resolution[{i}]",
                        f"resolution {n} is below the minimum of {MIN_RESOLUTION} per axis",
                    )
                )
        if base is not None and len(resolution) != base.dimension:
            issues.append(
                ConfigIssue(
                    "grid.resolution",
                    f"{len(resolution)} axes for a base of dimension {base.dimension}",
                )
            )
    radius = grid["truncation_radius"]
    if isinstance(base, PolarBase):
        if radius is None:
            issues.append(
                ConfigIssue(
                    "grid.truncation_radius",
                    f"the polar base '{base_conf.get('kind')}' needs a truncation radius",
                    "e.g. grid.truncation_radius=3.0",
                )
            )
        elif radius <= 0:
            issues.append(ConfigIssue("grid.truncation_radius", "must be positive"))

    flow = doc["flow"]
    horizon = flow["horizon"]
    if horizon is not None and horizon <= 0:
        issues.append(ConfigIssue("flow.horizon", f"T must be positive, got {horizon}"))
    cadence = flow["cadence"]
    if cadence is not None and cadence <= 0:
        issues.append(ConfigIssue("flow.cadence", f"must be positive, got {cadence}"))
    if flow["scheme"] is not None and flow["scheme"] not in [s.value for s in Scheme]:
        issues.append(
            ConfigIssue("flow.scheme", f"unknown scheme '{flow['scheme']}'", "euler or rk2")
        )
    dt = flow["dt"]
    if dt["mode"] == "cfl":
        fraction = dt["fraction"]
        if fraction is not None and not 0 < fraction <= MAX_CFL_FRACTION:
            issues.append(
                ConfigIssue("flow.dt.fraction", f"must lie in (0, {MAX_CFL_FRACTION}]")
            )
    elif dt["mode"] == "fixed":
        if dt["dt"] is None:
            issues.append(ConfigIssue("flow.dt.dt", "missing required field for mode 'fixed'"))
        elif dt["dt"] <= 0:
            issues.append(ConfigIssue("flow.dt.dt", "must be positive"))
    elif dt["mode"] is not None:
        issues.append(ConfigIssue("flow.dt.mode", f"unknown mode '{dt['mode']}'", "cfl or fixed"))

    monitors = doc["monitors"]
    for i, name in enumerate(monitors["enabled"] or []):
        if name not in MONITORS:
            issues.append(
                ConfigIssue(
                    f"monitors.enabled[{i}]",
                    f"unknown monitor '{name}'",
                    f"one of {sorted(MONITORS)}",
                )
            )
    for name in monitors["options"] or {}:
        if name not in MONITORS:
            issues.append(ConfigIssue(f"monitors.options.{name}", "unknown monitor"))
    numeric = {
        f
        for f, t in EstimateConstants.__annotations__.items()
        if t in ("float", "int") and f != "n"
    }
    for name, value in (monitors["constant_offsets"] or {}).items():
        path = f"monitors.constant_offsets.{name}"
        if name not in numeric:
            hint = f"one of {sorted(numeric)}"
            issues.append(ConfigIssue(path, "not a numeric estimate constant", hint))
        elif isinstance(value, bool) or not isinstance(value, _NUMBER):
            issues.append(ConfigIssue(path, "expected a number"))


def _check_counterexample(doc: Dict[str, Any], issues: List[ConfigIssue]) -> None:
    scenario = doc["counterexample"].get("scenario")
    if scenario is None:
        issues.append(
            ConfigIssue("counterexample.scenario", "missing required field", f"one of {SCENARIOS}")
        )
    elif scenario not in SCENARIOS:
        issues.append(
            ConfigIssue(
                "counterexample.scenario",
                f"unknown scenario '{scenario}'",
                f"one of {SCENARIOS}",
            )
        )
    horizon = doc["counterexample"].get("horizon")
    if horizon is not None and not horizon > 0:
        issues.append(ConfigIssue("counterexample.horizon", f"T must be positive, got {horizon}"))


def config_from_dict(data: Mapping[str, Any]) -> RunConfig:
    if isinstance(data, DictConfig):
        data = OmegaConf.to_container(data, resolve=True)
    issues: List[ConfigIssue] = []
    optional = _FLOW_ONLY if data.get("counterexample") is not None else set()
    doc = _walk(SCHEMA, data, "", issues, optional)

    if doc["counterexample"] is not None:
        _check_counterexample(doc, issues)
    else:
        _check_flow(doc, issues)
    if issues:
        raise ConfigError(issues)

    flow = doc["flow"]
    horizon = flow["horizon"]
    if horizon is None:
        horizon = float(doc["counterexample"].get("horizon", 1.0))
    cadence = flow["cadence"] if flow["cadence"] is not None else horizon / DEFAULT_SAMPLES
    dt = {k: v for k, v in flow["dt"].items() if v is not None}
    if dt["mode"] == "fixed":
        dt.pop("fraction", None)
    monitors = doc["monitors"]
    return RunConfig(
        name=doc["name"],
        base=doc["base"] or {},
        warp=doc["warp"],
        resolution=tuple(doc["grid"]["resolution"] or ()),
        truncation_radius=_maybe_float(doc["grid"]["truncation_radius"]),
        initial=doc["initial"] or {},
        horizon=float(horizon),
        cadence=float(cadence),
        scheme=flow["scheme"],
        dt=dt,
        stop_tolerance=_maybe_float(flow["stop_tolerance"]),
        monitors=list(monitors["enabled"]),
        monitor_options={k: dict(v or {}) for k, v in monitors["options"].items()},
        constant_offsets={k: float(v) for k, v in monitors["constant_offsets"].items()},
        tolerance_constant=float(monitors["tolerance_constant"]),
        refine=monitors["refine"],
        v0_bounded=monitors["v0_bounded"],
        gamma=float(monitors["gamma"]),
        output_dir=doc["output"]["dir"],
        snapshots=doc["output"]["snapshots"],
        verbose=doc["output"]["verbose"],
        restart=doc["restart"],
        seed=doc["seed"],
        counterexample=doc["counterexample"],
    )


def _maybe_float(x: Optional[Union[int, float]]) -> Optional[float]:
    return None if x is None else float(x)
