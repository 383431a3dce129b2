"""Training configuration and learning-rate schedule.
"""

from typing import Sequence, Tuple

import mobilego.utils.constants as c
import mobilego.utils.exception as e
from mobilego.models.netspec import VALUE_LOSSES
from mobilego.utils import logging

logger = logging.get_logger(__name__)


class TrainConfig:
    """Hyper-parameters of supervised training.

    An epoch is a fixed number of sampled states, not a pass over the corpus.

    """

    def __init__(
        self,
        value_loss: str = "mse",
        value_weight: float = 1.0,
        l2_weight: float = c.L2_WEIGHT,
        batch_size: int = c.BATCH_SIZE,
        epoch_samples: int = c.EPOCH_SAMPLES,
        schedule: Sequence[Tuple[int, float]] = c.SCHEDULE,
        total_epochs: int = c.TOTAL_EPOCHS,
        seed: int = 0,
        momentum: float = 0.0,
        workers: int = 0,
    ) -> None:
        """Initialization method.

        Args:
            value_loss: `mse` or `bce`.
            value_weight: Multiplier of the value loss.
            l2_weight: Multiplier of the squared kernel weights.
            batch_size: Samples per optimization step.
            epoch_samples: Samples per epoch.
            schedule: (start_epoch, learning_rate) pairs.
            total_epochs: Number of epochs.
            seed: Random seed.
            momentum: SGD momentum.
            workers: Data-loading worker processes.

        """

        self.value_loss = value_loss
        self.value_weight = value_weight
        self.l2_weight = l2_weight
        self.batch_size = batch_size
        self.epoch_samples = epoch_samples
        self.schedule = schedule
        self.total_epochs = total_epochs
        self.seed = seed
        self.momentum = momentum
        self.workers = workers

    @property
    def value_loss(self) -> str:
        """Loss of the value head."""

        return self._value_loss

    @value_loss.setter
    def value_loss(self, value_loss: str) -> None:
        if value_loss not in VALUE_LOSSES:
            raise e.ValueError(f"`value_loss` should be one of {VALUE_LOSSES}")

        self._value_loss = value_loss

    @property
    def value_weight(self) -> float:
        """Multiplier of the value loss."""

        return self._value_weight

    @value_weight.setter
    def value_weight(self, value_weight: float) -> None:
        if not isinstance(value_weight, (float, int)):
            raise e.TypeError("`value_weight` should be a float or integer")
        if value_weight <= 0:
            raise e.ValueError("`value_weight` should be > 0")

        self._value_weight = value_weight

    @property
    def l2_weight(self) -> float:
        """Multiplier of the squared kernel weights."""

        return self._l2_weight

    @l2_weight.setter
    def l2_weight(self, l2_weight: float) -> None:
        if not isinstance(l2_weight, (float, int)):
            raise e.TypeError("`l2_weight` should be a float or integer")
        if l2_weight < 0:
            raise e.ValueError("`l2_weight` should be >= 0")

        self._l2_weight = l2_weight

    @property
    def batch_size(self) -> int:
        """Samples per optimization step."""

        return self._batch_size

    @batch_size.setter
    def batch_size(self, batch_size: int) -> None:
        if not isinstance(batch_size, int):
            raise e.TypeError("`batch_size` should be an integer")
        if batch_size <= 0:
            raise e.ValueError("`batch_size` should be > 0")

        self._batch_size = batch_size

    @property
    def epoch_samples(self) -> int:
        """Samples per epoch."""

        return self._epoch_samples

    @epoch_samples.setter
    def epoch_samples(self, epoch_samples: int) -> None:
        if not isinstance(epoch_samples, int):
            raise e.TypeError("`epoch_samples` should be an integer")
        if epoch_samples <= 0:
            raise e.ValueError("`epoch_samples` should be > 0")

        self._epoch_samples = epoch_samples

    @property
    def schedule(self) -> Tuple[Tuple[int, float], ...]:
        """(start_epoch, learning_rate) pairs."""

        return self._schedule

    @schedule.setter
    def schedule(self, schedule: Sequence[Tuple[int, float]]) -> None:
        schedule = tuple((int(start), float(lr)) for start, lr in schedule)

        if not schedule or schedule[0][0] != 0:
            raise e.ValueError("`schedule` should start at epoch 0")
        if any(a[0] >= b[0] for a, b in zip(schedule, schedule[1:])):
            raise e.ValueError("`schedule` epochs should be strictly increasing")
        if any(lr <= 0 for _, lr in schedule):
            raise e.ValueError("`schedule` rates should be > 0")

        self._schedule = schedule

    @property
    def total_epochs(self) -> int:
        """Number of epochs."""

        return self._total_epochs

    @total_epochs.setter
    def total_epochs(self, total_epochs: int) -> None:
        if not isinstance(total_epochs, int):
            raise e.TypeError("`total_epochs` should be an integer")
        if total_epochs < 0:
            raise e.ValueError("`total_epochs` should be >= 0")

        self._total_epochs = total_epochs

    @property
    def seed(self) -> int:
        """Random seed."""

        return self._seed

    @seed.setter
    def seed(self, seed: int) -> None:
        if not isinstance(seed, int):
            raise e.TypeError("`seed` should be an integer")

        self._seed = seed

    @property
    def momentum(self) -> float:
        """SGD momentum."""

        return self._momentum

    @momentum.setter
    def momentum(self, momentum: float) -> None:
        if not isinstance(momentum, (float, int)):
            raise e.TypeError("`momentum` should be a float or integer")
        if not 0 <= momentum < 1:
            raise e.ValueError("`momentum` should be in [0, 1)")

        self._momentum = momentum

    @property
    def workers(self) -> int:
        """Data-loading worker processes."""

        return self._workers

    @workers.setter
    def workers(self, workers: int) -> None:
        if not isinstance(workers, int):
            raise e.TypeError("`workers` should be an integer")
        if workers < 0:
            raise e.ValueError("`workers` should be >= 0")

        self._workers = workers

    def __repr__(self) -> str:
        return (
            f"TrainConfig(value_loss={self.value_loss}, value_weight={self.value_weight}, "
            f"l2_weight={self.l2_weight}, batch_size={self.batch_size}, "
            f"epoch_samples={self.epoch_samples}, schedule={self.schedule}, "
            f"total_epochs={self.total_epochs}, seed={self.seed}, "
            f"momentum={self.momentum}, workers={self.workers})"
        )


def lr_at(cfg: TrainConfig, epoch: int) -> float:
    """Learning rate of an epoch: the last schedule entry started at or before it.

    Args:
        cfg: Training configuration.
        epoch: Epoch in [0, total_epochs).

    Returns:
        The learning rate.

    """

    if not 0 <= epoch < cfg.total_epochs:
        raise e.ValueError(f"`epoch` should be in [0, {cfg.total_epochs})")

    rate = cfg.schedule[0][1]
    for start, lr in cfg.schedule:
        if start <= epoch:
            rate = lr

    return rate
