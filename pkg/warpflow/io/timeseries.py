from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable
from typing import List
from typing import Sequence
from typing import Union

from loguru import logger

from warpflow.monitors.base import BoundReport

TIMESERIES_COLUMNS = ("t", "measured", "bound", "margin")


def _format(x: float) -> str:
    return format(float(x), ".17g")


def write_rows(
    path: Union[str, Path], columns: Sequence[str], rows: Iterable[Sequence[float]]
) -> Path:
    """Header row, then one line per row with 17 significant digits."""
    path = Path(path)
    try:
        path.parent.mkdir(exist_ok=True, parents=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_format(x) for x in row])
    except OSError as err:
        raise OSError(f"could not write time series {path}: {err}") from err
    return path


def write_timeseries(reports: Sequence[BoundReport], output_dir: Union[str, Path]) -> List[Path]:
    """One `<bound>.csv` per report, in time order."""
    paths = []
    for report in reports:
        rows = sorted(report.rows(), key=lambda row: row[0])
        path = write_rows(Path(output_dir) / f"{report.bound_id}.csv", TIMESERIES_COLUMNS, rows)
        logger.info(f"Wrote {len(rows)} rows of {report.bound_id} to {path}")
        paths.append(path)
    return paths
