"""Supervised training loop and validation.
"""

import copy
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import torch
from torch.utils.data import DataLoader
from tqdm import tqdm

import mobilego.utils.exception as e
from mobilego.core import CorpusStream, SampleDataset
from mobilego.game.encoder import Sample
from mobilego.game.records import Split
from mobilego.math.metrics import policy_accuracy, value_mse
from mobilego.models.netspec import NetworkSpec, count_params
from mobilego.models.network import PolicyValueNet
from mobilego.training.config import TrainConfig, lr_at
from mobilego.training.losses import Metrics, loss
from mobilego.utils import logging

logger = logging.get_logger(__name__)

LOG_COLUMNS = (
    "epoch",
    "lr",
    "policy_loss",
    "value_loss",
    "l2_loss",
    "val_accuracy",
    "val_mse",
)

EFFICIENCY_COLUMNS = ("name", "family", "params", "accuracy", "mse")


def _step(
    net: PolicyValueNet,
    optimizer: torch.optim.Optimizer,
    batch: Tuple[torch.Tensor, torch.Tensor, torch.Tensor],
    cfg: TrainConfig,
    step: int,
) -> Metrics:
    x, policy_target, value_target = batch

    policy, value = net.predict(x, mode="train")
    total, components = loss(
        policy,
        value,
        net.transfer(policy_target),
        net.transfer(value_target),
        cfg,
        weights=net.regularized_weights(),
        step=step,
    )

    optimizer.zero_grad()
    total.backward()
    optimizer.step()

    return components


def evaluate(net: PolicyValueNet, validation: Sequence[Sample], batch_size: int = 256) -> Metrics:
    """Evaluates a network on validation samples in infer mode.

    The value is always scored with the mean squared error, whatever loss
    trained it.

    Args:
        net: Network.
        validation: Samples, at least one.
        batch_size: Samples per forward pass.

    Returns:
        Top-1 policy accuracy and value MSE.

    """

    batches = DataLoader(SampleDataset(validation, show_log=False), batch_size=batch_size)

    policies, values, policy_targets, value_targets = [], [], [], []
    for x, policy_target, value_target in batches:
        policy, value = net.predict(x, mode="infer")

        policies.append(policy.cpu().numpy())
        values.append(value.cpu().numpy().reshape(-1))
        policy_targets.append(policy_target.numpy())
        value_targets.append(value_target.numpy())

    policies = np.concatenate(policies)

    return Metrics(
        policy_accuracy=policy_accuracy(policies, np.concatenate(policy_targets)),
        value_mse=value_mse(np.concatenate(values), np.concatenate(value_targets)),
    )


def write_log(log: List[Dict[str, float]], path: Union[str, Path]) -> None:
    """Writes the per-epoch metrics log as CSV (header always present)."""

    pd.DataFrame(log, columns=list(LOG_COLUMNS)).to_csv(path, index=False)


def train(
    spec: Union[NetworkSpec, PolicyValueNet],
    split: Split,
    cfg: TrainConfig,
    checkpoint: Optional[Union[str, Path]] = None,
    log_path: Optional[Union[str, Path]] = None,
    use_gpu: bool = False,
) -> Tuple[PolicyValueNet, List[Dict[str, float]]]:
    """Trains a network on randomly drawn corpus states.

    Every epoch draws ``cfg.epoch_samples`` states (each with a random
    symmetry), runs plain SGD at the scheduled rate, evaluates on the
    validation samples and writes a checkpoint. When the loss stops being
    finite the last good weights are restored (and re-saved) before the
    numeric error is raised again.

    Args:
        spec: Architecture to build, or a network to keep training.
        split: Training corpus and validation samples.
        cfg: Training configuration.
        checkpoint: File rewritten after every epoch (and before the first).
        log_path: CSV metrics log.
        use_gpu: Whether GPU should be used or not.

    Returns:
        The trained network and one metrics row per epoch.

    """

    torch.manual_seed(cfg.seed)

    net = spec if isinstance(spec, PolicyValueNet) else PolicyValueNet(spec, use_gpu=use_gpu)

    logger.info("Training %s with %s.", net.spec.name, cfg)

    optimizer = torch.optim.SGD(net.parameters(), lr=cfg.schedule[0][1], momentum=cfg.momentum)
    stream = CorpusStream(split.train, cfg.epoch_samples, seed=cfg.seed)

    if checkpoint:
        net.save(checkpoint)
    good = copy.deepcopy(net.state_dict())

    log, step = [], 0
    for epoch in range(cfg.total_epochs):
        logger.info("Epoch %d/%d", epoch + 1, cfg.total_epochs)

        start = time.time()

        lr = lr_at(cfg, epoch)
        for group in optimizer.param_groups:
            group["lr"] = lr

        stream.set_epoch(epoch)
        batches = DataLoader(stream, batch_size=cfg.batch_size, num_workers=cfg.workers)

        sums, n_batches = Metrics(), 0
        for batch in tqdm(batches):
            try:
                components = _step(net, optimizer, batch, cfg, step)
            except e.NumericError:
                net.load_state_dict(good)
                if checkpoint:
                    net.save(checkpoint)
                raise

            sums.policy_loss += components.policy_loss
            sums.value_loss += components.value_loss
            sums.l2_loss += components.l2_loss
            n_batches += 1
            step += 1

        if split.validation:
            metrics = evaluate(net, split.validation, cfg.batch_size)
        else:
            metrics = Metrics(policy_accuracy=float("nan"), value_mse=float("nan"))

        row = {
            "epoch": epoch,
            "lr": lr,
            "policy_loss": sums.policy_loss / n_batches,
            "value_loss": sums.value_loss / n_batches,
            "l2_loss": sums.l2_loss / n_batches,
            "val_accuracy": metrics.policy_accuracy,
            "val_mse": metrics.value_mse,
        }
        log.append(row)

        end = time.time()

        net.dump(**row, time=end - start)

        good = copy.deepcopy(net.state_dict())
        if checkpoint:
            net.save(checkpoint)

        logger.info(
            "Policy loss: %f | Value loss: %f | L2: %f | Accuracy: %f | MSE: %f",
            row["policy_loss"],
            row["value_loss"],
            row["l2_loss"],
            row["val_accuracy"],
            row["val_mse"],
        )

    if log_path:
        write_log(log, log_path)

    return net, log


def fit(
    net: PolicyValueNet,
    samples: Sequence[Sample],
    cfg: TrainConfig,
    passes: int,
    lr: Optional[float] = None,
) -> List[Metrics]:
    """Trains on a fixed list of samples, shuffled every pass.

    Args:
        net: Network.
        samples: Training samples.
        cfg: Training configuration (losses, batch size, momentum, seed).
        passes: Number of passes over the samples.
        lr: Learning rate, the first scheduled rate by default.

    Returns:
        The mean loss components of every pass.

    """

    torch.manual_seed(cfg.seed)
    generator = torch.Generator().manual_seed(cfg.seed)

    optimizer = torch.optim.SGD(
        net.parameters(), lr=lr or cfg.schedule[0][1], momentum=cfg.momentum
    )
    batches = DataLoader(
        SampleDataset(samples, show_log=False),
        batch_size=cfg.batch_size,
        shuffle=True,
        generator=generator,
    )

    history, step = [], 0
    for i in range(passes):
        sums = Metrics()
        for batch in batches:
            components = _step(net, optimizer, batch, cfg, step)

            sums.policy_loss += components.policy_loss / len(batches)
            sums.value_loss += components.value_loss / len(batches)
            sums.l2_loss += components.l2_loss / len(batches)
            step += 1

        history.append(sums)

        logger.debug(
            "Pass %d/%d | Policy loss: %f | Value loss: %f",
            i + 1,
            passes,
            sums.policy_loss,
            sums.value_loss,
        )

    return history


def efficiency(
    specs: Sequence[NetworkSpec], split: Split, cfg: TrainConfig
) -> pd.DataFrame:
    """Trains every architecture on the same data and scores it on validation.

    Args:
        specs: Architectures to compare.
        split: Training corpus and validation samples (at least one).
        cfg: Training configuration shared by every run.

    Returns:
        One row per architecture: name, block family, parameter count,
        validation policy accuracy and value MSE.

    """

    if not specs:
        raise e.SizeError("`specs` should hold at least one architecture")
    if not split.validation:
        raise e.SizeError("`split` should hold validation samples")

    rows = []
    for spec in specs:
        net, _ = train(spec, split, cfg)
        metrics = evaluate(net, split.validation, cfg.batch_size)

        rows.append(
            (spec.name, spec.block_family, count_params(spec), metrics.policy_accuracy, metrics.value_mse)
        )

        logger.info(
            "%s: %d parameters | Accuracy: %f | MSE: %f",
            spec.name,
            rows[-1][2],
            metrics.policy_accuracy,
            metrics.value_mse,
        )

    return pd.DataFrame(rows, columns=list(EFFICIENCY_COLUMNS))


def by_family(frame: pd.DataFrame) -> Dict[str, Dict[str, List[float]]]:
    """Groups an efficiency table into the curves of ``plot_efficiency``."""

    return {
        family: {
            "params": group["params"].tolist(),
            "accuracy": group["accuracy"].tolist(),
            "mse": group["mse"].tolist(),
        }
        for family, group in frame.groupby("family", sort=True)
    }
