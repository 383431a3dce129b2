"""Convergence-related visualization.
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

import mobilego.utils.exception as e


def _finish(fig: plt.Figure, output: Optional[Union[str, Path]]) -> None:
    if output:
        fig.savefig(output, bbox_inches="tight")
        plt.close(fig)
    else:
        plt.show()


def plot(
    *args,
    labels: Optional[List[str]] = None,
    title: str = "",
    subtitle: str = "",
    xlabel: str = "epoch",
    ylabel: str = "value",
    grid: bool = True,
    legend: bool = True,
    output: Optional[Union[str, Path]] = None,
) -> None:
    """Plots the convergence graph of desired variables.

    Essentially, each variable is a list or numpy array
    with size equals to (epochs x 1).

    Args:
        labels: Labels to be applied for each plot in legend.
        title: The title of the plot.
        subtitle: The subtitle of the plot.
        xlabel: The `x` axis label.
        ylabel: The `y` axis label.
        grid: If grid should be used or not.
        legend: If legend should be displayed or not.
        output: Image file to write instead of showing the figure.

    """

    if not args or not len(args[0]):
        raise e.SizeError("`args` should hold at least one non-empty variable")

    ticks = np.arange(1, len(args[0]) + 1)

    fig, ax = plt.subplots(figsize=(7, 5))

    ax.set(xlabel=xlabel, ylabel=ylabel)
    ax.set_xlim(xmin=1, xmax=max(ticks[-1], 2))
    ax.set_title(title, loc="left", fontsize=14)
    ax.set_title(subtitle, loc="right", fontsize=8, color="grey")

    if grid:
        ax.grid()

    if labels:
        if len(labels) != len(args):
            raise e.SizeError("`args` and `labels` should have the same size")
    else:
        labels = [f"variable_{i}" for i in range(len(args))]

    for (arg, label) in zip(args, labels):
        ax.plot(ticks, arg, label=label)

    if legend:
        ax.legend()

    _finish(fig, output)


def plot_log(
    path: Union[str, Path],
    columns: Sequence[str] = ("val_accuracy", "val_mse"),
    output: Optional[Union[str, Path]] = None,
) -> None:
    """Plots columns of a training metrics log.

    Args:
        path: CSV log written by training.
        columns: Columns to draw.
        output: Image file to write instead of showing the figure.

    """

    log = pd.read_csv(path)

    missing = [col for col in columns if col not in log.columns]
    if missing:
        raise e.ValueError(f"`columns` {missing} are not in the log")

    plot(
        *[log[col].to_numpy() for col in columns],
        labels=list(columns),
        title="Training",
        subtitle=str(path),
        output=output,
    )


def plot_efficiency(
    results: Dict[str, Dict[str, Sequence[float]]],
    metric: str = "accuracy",
    title: str = "",
    output: Optional[Union[str, Path]] = None,
) -> None:
    """Plots a validation metric against parameter counts, one line per family.

    Args:
        results: Family name -> {"params": counts, metric: values}.
        metric: Name of the metric key inside every family.
        title: The title of the plot.
        output: Image file to write instead of showing the figure.

    """

    if not results:
        raise e.SizeError("`results` should hold at least one family")

    fig, ax = plt.subplots(figsize=(7, 5))

    ax.set(xlabel="parameters", ylabel=metric)
    ax.set_title(title, loc="left", fontsize=14)
    ax.grid()

    for family, values in results.items():
        if len(values["params"]) != len(values[metric]):
            raise e.SizeError(f"`{family}` has {len(values['params'])} counts and {len(values[metric])} values")

        order = np.argsort(values["params"])
        ax.plot(
            np.asarray(values["params"])[order],
            np.asarray(values[metric])[order],
            marker="o",
            label=family,
        )

    ax.legend()

    _finish(fig, output)
