"""
Plot the bound time series of a finished run: measured sup against the bound, one panel per
`timeseries/<bound>.csv`, saved as `timeseries.png` next to the report.

    python scripts/plot_timeseries.py outputs/torus_gradient
"""
import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from loguru import logger  # noqa: E402


def read_series(path: Path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return {key: [float(r[key]) for r in rows] for key in ("t", "measured", "bound")}


def plot_run(run_dir: Path) -> Path:
    paths = sorted((run_dir / "timeseries").glob("*.csv"))
    if not paths:
        raise FileNotFoundError(f"no time series under {run_dir / 'timeseries'}")
    fig, axes = plt.subplots(1, len(paths), figsize=(5 * len(paths), 4), squeeze=False)
    for ax, path in zip(axes[0], paths):
        series = read_series(path)
        ax.plot(series["t"], series["measured"], label="measured")
        ax.plot(series["t"], series["bound"], linestyle="--", label="bound")
        ax.set_title(path.stem)
        ax.set_xlabel("t")
        ax.legend()
    fig.tight_layout()
    output = run_dir / "timeseries.png"
    fig.savefig(output, dpi=150)
    logger.info(f"Saved plot to {output.absolute()}")
    return output


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="plot the bound time series of a run")
    parser.add_argument("run_dir", type=Path)
    plot_run(parser.parse_args().run_dir)
