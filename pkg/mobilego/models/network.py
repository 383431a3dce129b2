"""Policy-value network built from a layer graph.
"""

from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

import mobilego.utils.exception as e
from mobilego.core import Model
from mobilego.models.netspec import Layer, NetworkSpec, build_graph, parse_name
from mobilego.utils import logging

logger = logging.get_logger(__name__)

MODES = ("train", "infer")

# Batch-norm epsilon of the reference training framework
BN_EPSILON = 1e-3


def _module(layer: Layer) -> Union[nn.Module, None]:
    """Torch module of a graph layer, None for stateless layers."""

    if layer.kind == "conv":
        return nn.Conv2d(
            layer.in_channels,
            layer.out_channels,
            layer.kernel,
            padding=layer.kernel // 2,
            bias=layer.bias,
        )
    if layer.kind == "depthwise_conv":
        return nn.Conv2d(
            layer.in_channels,
            layer.out_channels,
            layer.kernel,
            padding=layer.kernel // 2,
            groups=layer.in_channels,
            bias=layer.bias,
        )
    if layer.kind == "batch_norm":
        return nn.BatchNorm2d(layer.out_channels, eps=BN_EPSILON)
    if layer.kind == "dense":
        return nn.Linear(layer.in_channels, layer.out_channels)

    return None


class PolicyValueNet(Model):
    """A two-headed network: move probabilities and the probability White wins.

    Inputs are batches of encoded states shaped (B, size, size, planes);
    outputs are a (B, size²) policy and a (B, 1) value.

    """

    def __init__(
        self,
        spec: Union[NetworkSpec, str],
        zero_heads: bool = False,
        use_gpu: bool = False,
    ) -> None:
        """Initialization method.

        Args:
            spec: Architecture descriptor or network name.
            zero_heads: Whether the last layer of both heads starts at zero.
            use_gpu: Whether GPU should be used or not.

        """

        logger.info("Overriding class: Model -> PolicyValueNet.")

        super(PolicyValueNet, self).__init__(use_gpu=use_gpu)

        if isinstance(spec, str):
            spec = parse_name(spec)

        self.spec = spec
        self.graph = build_graph(spec)

        self.body = nn.ModuleDict()
        for layer in self.graph.layers:
            module = _module(layer)
            if module is not None:
                self.body[layer.name] = module

        if zero_heads:
            self.zero_heads()

        if self.device == "cuda":
            self.cuda()

        logger.info("Class overrided.")
        logger.debug(
            "Network: %s | Board: %d | Parameters: %d.",
            spec.name,
            spec.board,
            self.count_parameters(),
        )

    @property
    def spec(self) -> NetworkSpec:
        """Architecture descriptor."""

        return self._spec

    @spec.setter
    def spec(self, spec: NetworkSpec) -> None:
        if not isinstance(spec, NetworkSpec):
            raise e.TypeError("`spec` should be a NetworkSpec")

        self._spec = spec

    def zero_heads(self) -> None:
        """Zeroes the final layer of both heads: uniform policy and value 0.5."""

        last_policy = "policy_dense" if "policy_dense" in self.body else "policy_conv"

        with torch.no_grad():
            for name in (last_policy, "value_dense2"):
                for p in self.body[name].parameters():
                    p.zero_()

    def regularized_weights(self) -> List[nn.Parameter]:
        """Convolution and dense kernels, the only tensors under L2 penalty."""

        return [
            self.body[layer.name].weight
            for layer in self.graph.layers
            if layer.kind in ("conv", "depthwise_conv", "dense")
        ]

    def forward(self, x: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        """Performs a forward pass in the current train/eval mode.

        Args:
            x: Input planes shaped (B, size, size, planes).

        Returns:
            Policy and value tensors.

        """

        board, planes = self.spec.board, self.spec.input_planes
        if x.dim() != 4 or tuple(x.shape[1:]) != (board, board, planes) or not len(x):
            raise e.SizeError(
                f"`x` should be shaped (B, {board}, {board}, {planes}), got {tuple(x.shape)}"
            )

        outputs = {}
        for layer in self.graph.layers:
            inputs = [outputs[i] for i in layer.inputs]

            if layer.kind == "input":
                out = x.permute(0, 3, 1, 2).float()
            elif layer.name in self.body:
                out = self.body[layer.name](inputs[0])
            elif layer.kind == "relu":
                out = F.relu(inputs[0])
            elif layer.kind == "add":
                out = inputs[0] + inputs[1]
            elif layer.kind == "global_avg_pool":
                out = inputs[0].mean(dim=(2, 3))
            elif layer.kind == "flatten":
                out = torch.flatten(inputs[0], 1)
            elif layer.kind == "softmax":
                out = F.softmax(inputs[0], dim=1)
            elif layer.kind == "sigmoid":
                out = torch.sigmoid(inputs[0])
            else:
                raise e.BuildError(f"layer kind `{layer.kind}` can not be run")

            outputs[layer.name] = out

        return outputs[self.graph.policy], outputs[self.graph.value]

    def predict(
        self, x: Union[np.ndarray, torch.Tensor], mode: str = "infer"
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """Runs the network on a batch in train or infer mode.

        Infer mode uses the batch-norm running statistics and records no
        gradients; train mode updates the statistics and keeps the graph.

        Args:
            x: Input planes shaped (B, size, size, planes).
            mode: `train` or `infer`.

        Returns:
            Policy (B, size²) and value (B, 1) tensors.

        """

        if mode not in MODES:
            raise e.ValueError(f"`mode` should be one of {MODES}")

        if isinstance(x, np.ndarray):
            x = torch.from_numpy(np.ascontiguousarray(x, dtype=np.float32))
        x = self.transfer(x)

        if mode == "train":
            self.train()

            return self(x)

        self.eval()
        with torch.inference_mode():
            return self(x)

    def save(self, path: Union[str, Path]) -> None:
        """Saves the canonical name, board size and weights.

        Args:
            path: Checkpoint file.

        """

        torch.save(
            {
                "spec": self.spec.name,
                "board": self.spec.board,
                "state_dict": self.state_dict(),
            },
            path,
        )

        logger.debug("Checkpoint saved: %s.", path)

    @classmethod
    def load(cls, path: Union[str, Path], use_gpu: bool = False) -> "PolicyValueNet":
        """Rebuilds a network from a checkpoint.

        Args:
            path: Checkpoint file written by `save`.
            use_gpu: Whether GPU should be used or not.

        Returns:
            The network with its weights restored.

        """

        checkpoint = torch.load(path, map_location="cpu")

        net = cls(parse_name(checkpoint["spec"], checkpoint["board"]), use_gpu=use_gpu)
        net.load_state_dict(checkpoint["state_dict"])

        logger.debug("Checkpoint loaded: %s.", path)

        return net
