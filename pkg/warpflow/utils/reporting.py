from __future__ import annotations

import json
from pathlib import Path
from typing import Dict
from typing import List
from typing import Optional
from typing import Union

import rich
from loguru import logger
from rich.rule import Rule

from warpflow.utils.functional import to_jsonable


def indexed_output_file(path: Union[str, Path], max_trials: int = 10_000) -> Path:
    """
    Prefix the path with an index [0, 1, ....] to avoid overwriting previous results.

    Parameters
    ----------
    path
        The original path.
    max_trials
        Number of indices tried before giving up.

    Returns
    -------
    Path
        The indexed path.
    """
    path = Path(path)
    path.parent.mkdir(exist_ok=True, parents=True)
    for idx in range(max_trials):
        out_path = path.parent / f"{idx}_{path.name}"
        if not out_path.exists():
            return out_path
    raise FileExistsError(f"{max_trials} indexed copies of {path} already exist")


class JsonReporter:
    """
    Saves results as indexed JSON files under `output_dir` and pretty-prints them.

    Attributes
    ----------
    output_file_name
        Name of the JSON file, prefixed with an index on every save.
    summary_exclude
        Keys left out of the printed summary (but kept in the saved file).
    """

    output_file_name: str = "report.json"
    summary_exclude: List[str] = []

    def __init__(self, *, output_dir: Optional[Union[str, Path]] = None, verbose: bool = False):
        super().__init__()
        self.verbose = verbose
        self.output_dir = Path(output_dir) if output_dir is not None else None
        if self.output_dir is not None:
            self.output_dir.mkdir(exist_ok=True, parents=True)

    def _process_results(self, results: Dict) -> Optional[Path]:
        results = to_jsonable(results)
        path = None
        if self.output_dir is not None:
            path = self.save_as_json(results)
        if self.verbose:
            self.pprint_json_results(results)
        return path

    def save_as_json(self, results: Union[dict, list]) -> Path:
        """
        Save results as json file.
        """
        path = indexed_output_file(self.output_dir / self.output_file_name)
        logger.info(f"Saving {type(self).__name__} results to {path.absolute()}")
        with open(path, "w") as f:
            json.dump(results, f, indent=2)
        return path

    def pprint_json_results(self, results: Union[dict, list]):
        """Print results as JSON"""
        if isinstance(results, dict):
            results = {k: v for k, v in results.items() if k not in self.summary_exclude}
        rich.print(Rule())
        rich.print(f"=== {type(self).__name__} ===")
        rich.print(Rule(characters="."))
        rich.print(json.dumps(results, indent=2))
        rich.print(Rule())
