import os

import hydra
import numpy as np
from omegaconf import DictConfig
from omegaconf import OmegaConf

from warpflow.scenarios.config import config_from_dict
from warpflow.scenarios.pipeline import run_scenario
from warpflow.utils.config import print_config
from warpflow.utils.resolvers import register_resolvers

register_resolvers()


def run_experiment_with_config(config: DictConfig) -> int:
    # set random seed if not specified
    if config.scenario.get("seed", None) is None:
        config.scenario.seed = int(np.random.randint(0, 2**31 - 1))

    # save config to file
    with open("config.yaml", "w") as f:
        f.write(OmegaConf.to_yaml(config))

    # Pretty print config using Rich library
    if config.get("print_config"):
        print_config(config, resolve=False)

    run_config = config_from_dict(OmegaConf.to_container(config.scenario, resolve=True))
    result = run_scenario(run_config, output_dir=os.getcwd())
    return int(result.exit_code)


@hydra.main(config_path="../configs/", config_name="config.yaml", version_base="1.2")
def run_experiment(config: DictConfig) -> int:
    return run_experiment_with_config(config)
