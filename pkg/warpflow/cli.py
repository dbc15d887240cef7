"""
Command-line entry point.

    warpflow flow <scenario|path> [key=value ...]
    warpflow verify [--catalog] [--residual-levels N N]
    warpflow counterexample <scenario|path> [key=value ...]
    warpflow sweep <scenario|path> --param key=v1,v2,... [key=value ...]

Scenarios are the names of `warpflow/configs/scenario/*.yaml` or paths to YAML / dotlist
documents. Output goes to --output-dir, else `output.dir`, else $WARPFLOW_OUTPUT_ROOT/<name>.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List
from typing import Optional
from typing import Tuple

import dotenv
from loguru import logger
from omegaconf import OmegaConf

from warpflow import configs
from warpflow.oracle.conformance import run_verification
from warpflow.scenarios.config import parse_config
from warpflow.scenarios.config import RunConfig
from warpflow.scenarios.pipeline import ExitCode
from warpflow.scenarios.pipeline import output_root
from warpflow.scenarios.pipeline import run_scenario
from warpflow.scenarios.pipeline import run_sweep
from warpflow.utils.config import print_config
from warpflow.utils.exceptions import ConfigError
from warpflow.utils.exceptions import ConfigIssue
from warpflow.utils.resolvers import register_resolvers

SCENARIO_DIR = Path(configs.__file__).parent / "scenario"


def builtin_scenarios() -> List[str]:
    return sorted(p.stem for p in SCENARIO_DIR.glob("*.yaml"))


def scenario_path(name_or_path: str) -> Path:
    path = Path(name_or_path)
    if path.exists():
        return path
    builtin = SCENARIO_DIR / f"{name_or_path}.yaml"
    if builtin.exists():
        return builtin
    raise ConfigError(
        [
            ConfigIssue(
                "<scenario>",
                f"no such file or built-in scenario: {name_or_path}",
                f"built-in scenarios: {builtin_scenarios()}",
            )
        ]
    )


def load_run_config(name_or_path: str, overrides: List[str]) -> RunConfig:
    path = scenario_path(name_or_path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise ConfigError([ConfigIssue("<scenario>", f"cannot read {path}: {err}")]) from err
    return parse_config(text, overrides)


def parse_param(param: str) -> Tuple[str, List[str]]:
    """`key=v1,v2,...` -> (key, [v1, v2, ...])"""
    key, sep, values = param.partition("=")
    if not sep or not key.strip() or not values.strip():
        raise ConfigError(
            [ConfigIssue("--param", f"expected key=v1,v2,..., got '{param}'", "e.g. seed=1,2")]
        )
    return key.strip(), [v.strip() for v in values.split(",") if v.strip()]


def _report_config_error(err: ConfigError) -> int:
    logger.error(f"Invalid configuration:\n{err}")
    return int(ExitCode.CONFIG_ERROR)


def cmd_flow(args: argparse.Namespace, counterexample: bool = False) -> int:
    try:
        config = load_run_config(args.scenario, args.overrides)
    except ConfigError as err:
        return _report_config_error(err)
    if counterexample != config.is_counterexample:
        expected = "a counterexample" if counterexample else "a graph-flow"
        issue = ConfigIssue("counterexample", f"{args.scenario} is not {expected} scenario")
        return _report_config_error(ConfigError([issue]))
    if args.print_config:
        print_config(OmegaConf.create(config.to_dict()))
    result = run_scenario(config, output_dir=args.output_dir)
    return int(result.exit_code)


def cmd_verify(args: argparse.Namespace) -> int:
    output_dir = args.output_dir or output_root() / "verify"
    return run_verification(
        catalog=args.catalog,
        output_dir=output_dir,
        seed=args.seed,
        residual_levels=args.residual_levels,
    )


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        config = load_run_config(args.scenario, args.overrides)
        key, values = parse_param(args.param)
    except ConfigError as err:
        return _report_config_error(err)
    code, _ = run_sweep(config, key, values, output_dir=args.output_dir)
    return int(code)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warpflow", description="Mean curvature flow of graphs in warped products"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p: argparse.ArgumentParser):
        p.add_argument("scenario", help="built-in scenario name or path to a scenario document")
        p.add_argument("overrides", nargs="*", help="key=value overrides, e.g. flow.horizon=1.0")
        p.add_argument("--output-dir", type=Path, default=None, help="output directory")
        p.add_argument("--print-config", action="store_true", help="print the resolved config")

    flow = subparsers.add_parser("flow", help="run a graph-flow scenario and its monitors")
    scenario_args(flow)
    flow.set_defaults(func=cmd_flow)

    counter = subparsers.add_parser("counterexample", help="run a profile-curve scenario")
    scenario_args(counter)
    counter.set_defaults(func=lambda a: cmd_flow(a, counterexample=True))

    sweep = subparsers.add_parser("sweep", help="run a scenario once per parameter value")
    scenario_args(sweep)
    sweep.add_argument("--param", required=True, help="key=v1,v2,... values to sweep")
    sweep.set_defaults(func=cmd_sweep)

    verify = subparsers.add_parser("verify", help="run the conformance checks, no flow")
    verify.add_argument("--catalog", action="store_true", help="run the full catalog")
    verify.add_argument("--seed", type=int, default=0, help="seed of the randomized checks")
    verify.add_argument(
        "--residual-levels",
        type=int,
        nargs=2,
        default=None,
        metavar="N",
        help="grid sizes of the residual refinement study, e.g. 64 128",
    )
    verify.add_argument("--output-dir", type=Path, default=None, help="output directory")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    dotenv.load_dotenv(dotenv.find_dotenv(usecwd=True))
    register_resolvers()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
