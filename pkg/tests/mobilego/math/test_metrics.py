import numpy as np
import pytest
import torch

from mobilego.math import metrics
from mobilego.utils import exception


def test_policy_accuracy():
    policy = torch.tensor([[0.1, 0.9], [0.8, 0.2], [0.3, 0.7], [0.6, 0.4]])
    targets = torch.tensor([1, 0, 0, 1])

    assert metrics.policy_accuracy(policy, targets) == 0.5
    assert metrics.policy_accuracy(policy.numpy(), targets.numpy()) == 0.5

    with pytest.raises(exception.SizeError):
        metrics.policy_accuracy(policy, targets[:2])


def test_value_mse():
    assert metrics.value_mse(np.full(4, 0.5), np.array([0, 1, 0, 1])) == 0.25
    assert metrics.value_mse(torch.ones(3, 1), torch.ones(3)) == 0.0

    with pytest.raises(exception.SizeError):
        metrics.value_mse(np.zeros(0), np.zeros(0))


@pytest.mark.parametrize(
    "winrate, sigma, tolerance",
    [
        (0.754, 0.027, 0.0005),
        (0.710, 0.029, 0.0005),
        (0.671, 0.030, 0.0005),
        (0.591, 0.031, 0.0005),
        (0.575, 0.031, 0.0005),
        (0.377, 0.031, 0.0005),
        (0.313, 0.028, 0.002),
        (0.008, 0.006, 0.0005),
    ],
)
def test_winrate_sigma(winrate, sigma, tolerance):
    assert abs(metrics.winrate_sigma(winrate, 252) - sigma) <= tolerance


def test_winrate_sigma_errors():
    assert metrics.winrate_sigma(1.0, 10) == 0.0

    with pytest.raises(exception.ValueError):
        metrics.winrate_sigma(0.5, 0)

    with pytest.raises(exception.ValueError):
        metrics.winrate_sigma(1.5, 10)
