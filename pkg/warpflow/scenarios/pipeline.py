"""
Scenario orchestration: geometry -> initial state -> flow -> monitors -> artifacts.

Artifacts of a run, all under the output directory:
    snapshots/            one snapshot per sample time
    timeseries/<bound>.csv
    monitors/<i>_<bound>.json
    <i>_report.json       constants, config echo and per-bound verdicts
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np
from loguru import logger

from warpflow.counterflow.scenarios import run_counterexample
from warpflow.geometry.catalog import build_pair
from warpflow.geometry.constants import estimate_constants
from warpflow.geometry.constants import EstimateConstants
from warpflow.geometry.grid import Grid
from warpflow.graphflow.fields import compute_fields
from warpflow.graphflow.flow import FlowConfig
from warpflow.graphflow.flow import run_flow
from warpflow.graphflow.flow import Trajectory
from warpflow.graphflow.state import GraphState
from warpflow.graphflow.timestep import AutoTimeStep
from warpflow.io.snapshot import load_snapshot
from warpflow.io.snapshot import save_snapshot
from warpflow.io.snapshot import snapshot_name
from warpflow.io.timeseries import write_rows
from warpflow.io.timeseries import write_timeseries
from warpflow.monitors.base import BoundReport
from warpflow.monitors.base import classify_violation
from warpflow.monitors.base import discretization_tolerance
from warpflow.monitors.base import Monitor
from warpflow.monitors.factory import AutoMonitor
from warpflow.scenarios.config import RunConfig
from warpflow.scenarios.initial import initial_height
from warpflow.utils.exceptions import BlowUpError
from warpflow.utils.exceptions import ConfigError
from warpflow.utils.exceptions import ConfigIssue
from warpflow.utils.exceptions import PreconditionError
from warpflow.utils.exceptions import WarpflowError
from warpflow.utils.provenance import run_provenance
from warpflow.utils.reporting import JsonReporter

OUTPUT_ROOT_ENV = "WARPFLOW_OUTPUT_ROOT"
COUNTEREXAMPLE_COLUMNS = ("t", "sup_v_eq", "sup_v_geo")
REFINEMENT_FACTOR = 2


class ExitCode(IntEnum):
    PASSED = 0
    CHECK_FAILED = 1
    VIOLATION = 2
    BLOW_UP = 3
    CONFIG_ERROR = 4


@dataclass
class ScenarioResult:
    exit_code: ExitCode
    report: Dict[str, Any]
    output_dir: Path
    report_path: Optional[Path] = None


class ScenarioReporter(JsonReporter):
    output_file_name = "report.json"
    summary_exclude = ["config", "constants", "provenance", "snapshots"]


class SweepReporter(JsonReporter):
    output_file_name = "sweep.json"


def output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "outputs"))


def resolve_seed(config: RunConfig) -> RunConfig:
    """Draw a seed when none is given; the drawn seed is echoed in the report."""
    if config.seed is not None:
        return config
    return dataclasses.replace(config, seed=int(np.random.randint(0, 2**31 - 1)))


def build_state(config: RunConfig, grid: Optional[Grid] = None) -> GraphState:
    """The initial GraphState of a scenario, or the restart snapshot when one is configured."""
    if config.restart is not None and grid is None:
        state = load_snapshot(config.restart)
        if not isinstance(state, GraphState):
            raise ConfigError([ConfigIssue("restart", "the snapshot is not a graph state")])
        logger.info(f"Restarting from {config.restart} at t={state.t}")
        return state
    base, warp = build_pair(config.base, config.warp)
    if grid is None:
        grid = base.make_grid(list(config.resolution), config.truncation_radius)
    u = initial_height(grid, config.initial, seed=config.seed or 0)
    return GraphState(base, warp, grid, u)


def scenario_constants(config: RunConfig, state: GraphState) -> EstimateConstants:
    v0_sup = float(np.max(compute_fields(state).v))
    constants = estimate_constants(
        state.base,
        state.warp,
        state.grid,
        v0_sup,
        config.horizon,
        v0_bounded=config.v0_bounded,
        gamma=config.gamma,
    )
    if config.constant_offsets:
        logger.warning(f"Offsetting estimate constants by {config.constant_offsets}")
        constants = constants.with_offsets(**config.constant_offsets)
    return constants


def flow_config(config: RunConfig, on_sample=None) -> FlowConfig:
    return FlowConfig(
        horizon=config.horizon,
        cadence=config.cadence,
        scheme=config.scheme,
        dt_policy=AutoTimeStep(**config.dt),
        stop_tolerance=config.stop_tolerance,
        on_sample=on_sample,
    )


def build_monitors(config: RunConfig, output_dir: Optional[Path] = None) -> List[Monitor]:
    return [
        AutoMonitor(
            name,
            tolerance_constant=config.tolerance_constant,
            output_dir=output_dir,
            verbose=config.verbose,
            **config.monitor_options.get(name, {}),
        )
        for name in config.monitors
    ]


class SnapshotWriter:
    """`on_sample` callback saving the sampled state (or curve) under `directory`."""

    def __init__(self, directory: Union[str, Path], attr: str = "state"):
        self.directory = Path(directory)
        self.attr = attr
        self.names: List[str] = []

    def __call__(self, sample) -> None:
        obj = getattr(sample, self.attr)
        name = snapshot_name(obj.t, len(self.names))
        save_snapshot(obj, self.directory / name)
        self.names.append(name)


def _flow(state: GraphState, config: FlowConfig) -> Tuple[Trajectory, bool]:
    try:
        return run_flow(state, config), False
    except BlowUpError as err:
        return err.trajectory, True


def classify_by_refinement(
    config: RunConfig,
    state: GraphState,
    monitors: Sequence[Monitor],
    reports: Sequence[BoundReport],
) -> None:
    """
    Rerun the scenario on a grid refined by REFINEMENT_FACTOR and classify every unclassified
    violation by how its excess changes.
    """
    pending = [(m, r) for m, r in zip(monitors, reports) if r.violation is not None]
    pending = [(m, r) for m, r in pending if r.violation.classification is None]
    if not pending:
        return
    if state.t != 0.0:
        logger.warning("Violations of a restarted run are left unclassified")
        return
    fine_grid = state.grid.refined(REFINEMENT_FACTOR)
    logger.info(f"Classifying {len(pending)} violation(s) on the refined grid {fine_grid.shape}")
    fine_state = build_state(config, grid=fine_grid)
    fine_constants = scenario_constants(config, fine_state)
    fine_traj, _ = _flow(fine_state, flow_config(config))
    for monitor, report in pending:
        tolerance = discretization_tolerance(fine_traj, monitor.tolerance_constant)
        fine = monitor.evaluate(fine_traj, fine_constants, tolerance=tolerance)
        coarse_excess = report.violation.excess
        fine_excess = max(0.0, -fine.min_margin)
        report.violation.classification = classify_violation(
            coarse_excess, fine_excess, ratio=REFINEMENT_FACTOR
        )
        report.details["refinement"] = {
            "resolution": list(fine_grid.shape),
            "coarse_excess": coarse_excess,
            "fine_excess": fine_excess,
        }
        logger.info(
            f"{report.bound_id}: excess {coarse_excess:.3e} -> {fine_excess:.3e}, "
            f"classified as {report.violation.classification}"
        )


def exit_code_of(reports: Sequence[BoundReport], blown_up: bool) -> ExitCode:
    if any(r.error is not None for r in reports):
        return ExitCode.CONFIG_ERROR
    if blown_up:
        return ExitCode.BLOW_UP
    if any(r.is_genuine for r in reports):
        return ExitCode.VIOLATION
    return ExitCode.PASSED


def _verdict(report: BoundReport) -> Dict[str, Any]:
    out = report.to_dict()
    out.pop("records")
    out.pop("constants")
    return out


def _finish(
    config: RunConfig, output_dir: Path, code: ExitCode, body: Dict[str, Any]
) -> ScenarioResult:
    report = {
        "scenario": config.name,
        "exit_code": int(code),
        **body,
        "config": config.to_dict(),
        "provenance": run_provenance(),
    }
    reporter = ScenarioReporter(output_dir=output_dir, verbose=config.verbose)
    path = reporter._process_results(report)
    logger.info(f"Scenario {config.name} finished with exit code {int(code)} ({code.name})")
    return ScenarioResult(exit_code=code, report=report, output_dir=output_dir, report_path=path)


def _config_failure(config: RunConfig, output_dir: Path, err: Exception) -> ScenarioResult:
    logger.error(f"Scenario {config.name} could not be set up: {err}")
    issues = [i.to_dict() for i in err.issues] if isinstance(err, ConfigError) else None
    return _finish(config, output_dir, ExitCode.CONFIG_ERROR, {"error": str(err), "issues": issues})


def _unmet_preconditions(
    monitors: Sequence[Monitor], state: GraphState, constants: EstimateConstants
) -> List[BoundReport]:
    rejected = []
    for monitor in monitors:
        try:
            monitor.check_preconditions(state)
        except PreconditionError as err:
            rejected.append(monitor.reject(err, constants))
    return rejected


def run_flow_scenario(config: RunConfig, output_dir: Path) -> ScenarioResult:
    try:
        state = build_state(config)
        constants = scenario_constants(config, state)
        monitors = build_monitors(config, output_dir / "monitors")
    except (WarpflowError, OSError, ValueError, TypeError) as err:
        return _config_failure(config, output_dir, err)
    rejected = _unmet_preconditions(monitors, state, constants)
    if rejected:
        body = {
            "status": "not-started",
            "verdicts": {r.bound_id: _verdict(r) for r in rejected},
            "constants": constants.to_dict(),
            "snapshots": [],
        }
        return _finish(config, output_dir, ExitCode.CONFIG_ERROR, body)

    writer = SnapshotWriter(output_dir / "snapshots") if config.snapshots else None
    traj, blown_up = _flow(state, flow_config(config, on_sample=writer))

    reports = [monitor(traj, constants) for monitor in monitors]
    if config.refine and not blown_up:
        classify_by_refinement(config, state, monitors, reports)
    csvs = write_timeseries(reports, output_dir / "timeseries")

    code = exit_code_of(reports, blown_up)
    body = {
        "status": traj.status,
        "failure": traj.failure,
        "trajectory": {
            "steps": traj.steps,
            "dt": traj.dt,
            "samples": len(traj),
            "t_final": traj.final.t,
            "grid": list(traj.grid.shape),
        },
        "verdicts": {r.bound_id: _verdict(r) for r in reports},
        "constants": constants.to_dict(),
        "timeseries": [p.name for p in csvs],
        "snapshots": writer.names if writer is not None else [],
    }
    return _finish(config, output_dir, code, body)


def run_counterexample_scenario(config: RunConfig, output_dir: Path) -> ScenarioResult:
    params = dict(config.counterexample)
    scenario = params.pop("scenario")
    params.setdefault("horizon", config.horizon)
    writer = SnapshotWriter(output_dir / "snapshots", attr="curve") if config.snapshots else None
    try:
        report = run_counterexample(scenario, on_sample=writer, **params)
    except (ValueError, TypeError) as err:
        return _config_failure(config, output_dir, err)

    rows = [(s["t"], s["sup_v_eq"], s["sup_v_geo"]) for s in report.timeseries()]
    csv = write_rows(output_dir / "counterexample.csv", COUNTEREXAMPLE_COLUMNS, rows)
    code = ExitCode.PASSED if report.passed else ExitCode.VIOLATION
    body = {
        "counterexample": report.to_dict(),
        "timeseries": [csv.name],
        "snapshots": writer.names if writer is not None else [],
    }
    return _finish(config, output_dir, code, body)


def run_scenario(
    config: RunConfig, output_dir: Optional[Union[str, Path]] = None
) -> ScenarioResult:
    """
    Run one scenario and write its artifacts.

    The output directory is, in order: `output_dir`, `config.output_dir`, or
    `$WARPFLOW_OUTPUT_ROOT/<name>` (default root `outputs`). The exit code is 0 when no bound is
    genuinely violated, 2 on a genuine violation, 3 on blow-up and 4 on configuration or
    precondition errors.
    """
    config = resolve_seed(config)
    if output_dir is None:
        output_dir = config.output_dir or output_root() / config.name
    output_dir = Path(output_dir)
    output_dir.mkdir(exist_ok=True, parents=True)
    logger.info(f"Running scenario {config.name} (seed={config.seed}) into {output_dir}")
    if config.is_counterexample:
        return run_counterexample_scenario(config, output_dir)
    return run_flow_scenario(config, output_dir)


def _value_label(value: Any) -> str:
    return str(value).replace("/", "_").replace(" ", "")


def run_sweep(
    config: RunConfig,
    key: str,
    values: Sequence[str],
    output_dir: Optional[Union[str, Path]] = None,
) -> Tuple[ExitCode, Dict[str, Any]]:
    """
    Run the scenario once per value of the dotted `key`, each in its own sub-directory, and
    summarize them in `sweep.json`. The sweep's exit code is the largest of the runs'.
    """
    config = resolve_seed(config)
    root = Path(output_dir or config.output_dir or output_root() / config.name)
    runs = []
    for value in values:
        run_dir = root / f"{key}={_value_label(value)}"
        try:
            run_config = config.override([f"{key}={value}"])
        except ConfigError as err:
            logger.error(f"Sweep value {key}={value} is invalid: {err}")
            runs.append(
                {
                    "value": value,
                    "exit_code": int(ExitCode.CONFIG_ERROR),
                    "issues": [i.to_dict() for i in err.issues],
                }
            )
            continue
        result = run_scenario(run_config, run_dir)
        runs.append(
            {
                "value": value,
                "exit_code": int(result.exit_code),
                "output_dir": run_dir.name,
                "verdicts": {
                    k: v["passed"] for k, v in result.report.get("verdicts", {}).items()
                },
            }
        )
    code = ExitCode(max((r["exit_code"] for r in runs), default=0))
    summary = {"scenario": config.name, "key": key, "exit_code": int(code), "runs": runs}
    SweepReporter(output_dir=root, verbose=config.verbose)._process_results(summary)
    return code, summary
