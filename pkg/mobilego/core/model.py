"""Base class of the networks.
"""

from typing import Any, Dict, List

import torch

import mobilego.utils.exception as e
from mobilego.utils import logging

logger = logging.get_logger(__name__)

DEVICES = ("cpu", "cuda")


class Model(torch.nn.Module):
    """A torch module bound to one device, with a per-epoch training history.

    Children build their layers in their own constructor; the history is
    filled by the trainer, one entry per epoch and logged quantity.

    """

    def __init__(self, use_gpu: bool = False) -> None:
        """Initialization method.

        Args:
            use_gpu: Whether to run on CUDA when it is available.

        """

        super(Model, self).__init__()

        self.device = "cuda" if use_gpu and torch.cuda.is_available() else "cpu"
        self.history = {}

        logger.debug("Device: %s.", self.device)

    @property
    def device(self) -> str:
        """Device holding the weights and receiving the inputs."""

        return self._device

    @device.setter
    def device(self, device: str) -> None:
        if device not in DEVICES:
            raise e.TypeError(f"`device` should be one of {DEVICES}")

        self._device = device

    @property
    def history(self) -> Dict[str, List[Any]]:
        """Values logged by the trainer, keyed by quantity."""

        return self._history

    @history.setter
    def history(self, history: Dict[str, List[Any]]) -> None:
        self._history = history

    def count_parameters(self) -> int:
        """Counts trainable values plus the running statistics of batch norms."""

        stored = sum(
            b.numel()
            for name, b in self.named_buffers()
            if not name.endswith("num_batches_tracked")
        )

        return sum(p.numel() for p in self.parameters()) + stored

    def transfer(self, x: torch.Tensor) -> torch.Tensor:
        """Moves a tensor to the device of the model (no copy when already there)."""

        return x.to(self.device)

    def dump(self, **kwargs) -> None:
        """Appends one value per keyword to the history."""

        for k, v in kwargs.items():
            self.history.setdefault(k, []).append(v)
