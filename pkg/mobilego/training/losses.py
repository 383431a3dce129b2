"""Policy, value and L2 losses.
"""

from dataclasses import asdict, dataclass
from typing import Dict, Iterable, Tuple

import torch

import mobilego.utils.constants as c
import mobilego.utils.exception as e
from mobilego.training.config import TrainConfig
from mobilego.utils import logging

logger = logging.get_logger(__name__)


@dataclass
class Metrics:
    """Validation metrics plus the training-side loss components of an epoch.

    ``value_loss`` is the weighted value component (value_weight times the
    configured value loss).

    """

    policy_accuracy: float = 0.0
    value_mse: float = 0.0
    policy_loss: float = 0.0
    value_loss: float = 0.0
    l2_loss: float = 0.0

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def policy_cross_entropy(policy: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Mean categorical cross-entropy of softmax outputs against played moves."""

    chosen = policy.gather(1, target.view(-1, 1)).squeeze(1)

    return -torch.log(chosen.clamp(c.EPSILON, 1.0)).mean()


def value_error(value: torch.Tensor, target: torch.Tensor, kind: str) -> torch.Tensor:
    """Mean squared error or binary cross-entropy of the value head.

    Args:
        value: Predicted probabilities that White wins, any shape.
        target: Game results, broadcastable to ``value``.
        kind: `mse` or `bce`.

    Returns:
        The scalar loss.

    """

    value = value.reshape(-1)
    target = target.reshape(-1).to(value.dtype)

    if kind == "mse":
        return torch.mean((value - target) ** 2)

    value = value.clamp(c.EPSILON, 1 - c.EPSILON)

    return -torch.mean(target * torch.log(value) + (1 - target) * torch.log(1 - value))


def l2_penalty(weights: Iterable[torch.Tensor]) -> torch.Tensor:
    """Sum of the squares of the given tensors."""

    total = torch.zeros(())
    for w in weights:
        total = total.to(w.device) + w.pow(2).sum()

    return total


def loss(
    policy: torch.Tensor,
    value: torch.Tensor,
    policy_target: torch.Tensor,
    value_target: torch.Tensor,
    cfg: TrainConfig,
    weights: Iterable[torch.Tensor] = (),
    step: int = 0,
) -> Tuple[torch.Tensor, Metrics]:
    """Total training loss and its components.

    Args:
        policy: Policy outputs (B, moves).
        value: Value outputs (B, 1).
        policy_target: Flat indices of the played moves.
        value_target: Game results.
        cfg: Training configuration.
        weights: Tensors under L2 penalty.
        step: Optimization step, reported on numeric failures.

    Returns:
        The differentiable total and the (detached) components.

    """

    if len(policy) != len(policy_target) or len(value) != len(value_target):
        raise e.SizeError("outputs and targets should have the same batch size")

    if not (torch.isfinite(policy).all() and torch.isfinite(value).all()):
        raise e.NumericError(step, "network outputs are not finite")

    policy_part = policy_cross_entropy(policy, policy_target)
    value_part = cfg.value_weight * value_error(value, value_target, cfg.value_loss)
    l2_part = cfg.l2_weight * l2_penalty(weights)

    total = policy_part + value_part + l2_part
    if not torch.isfinite(total):
        raise e.NumericError(step, "loss is not finite")

    components = Metrics(
        policy_loss=policy_part.item(),
        value_loss=value_part.item(),
        l2_loss=l2_part.item(),
    )

    return total, components
