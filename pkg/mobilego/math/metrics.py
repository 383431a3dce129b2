"""Metrics-related mathematical functions.
"""

import math
from typing import Union

import numpy as np
import torch

import mobilego.utils.exception as e
from mobilego.utils import logging

logger = logging.get_logger(__name__)

Array = Union[np.ndarray, torch.Tensor]


def _numpy(x: Array) -> np.ndarray:
    if isinstance(x, torch.Tensor):
        return x.detach().cpu().numpy()

    return np.asarray(x)


def policy_accuracy(policy: Array, targets: Array) -> float:
    """Calculates the top-1 move prediction accuracy.

    Args:
        policy: Move probabilities shaped (B, moves).
        targets: Flat indices of the played moves.

    Returns:
        (float): Fraction of rows whose most probable move was played.

    """

    policy, targets = _numpy(policy), _numpy(targets).reshape(-1)
    if len(policy) != len(targets) or not len(targets):
        raise e.SizeError("`policy` and `targets` should have the same non-zero length")

    return float(np.mean(np.argmax(policy, axis=1) == targets))


def value_mse(values: Array, targets: Array) -> float:
    """Calculates the mean squared error of the value head.

    Args:
        values: Predicted probabilities that White wins.
        targets: Game results (1.0 when White won).

    Returns:
        (float): Mean squared error.

    """

    values, targets = _numpy(values).reshape(-1), _numpy(targets).reshape(-1)
    if len(values) != len(targets) or not len(targets):
        raise e.SizeError("`values` and `targets` should have the same non-zero length")

    return float(np.mean((values.astype(np.float64) - targets) ** 2))


def winrate_sigma(winrate: float, games: int) -> float:
    """Calculates the binomial standard error of a winrate.

    Args:
        winrate: Fraction of games won.
        games: Number of games played.

    Returns:
        (float): sqrt(w(1 - w) / n).

    """

    if games < 1:
        raise e.ValueError("`games` should be >= 1")
    if not 0 <= winrate <= 1:
        raise e.ValueError("`winrate` should be in [0, 1]")

    return math.sqrt(winrate * (1 - winrate) / games)
