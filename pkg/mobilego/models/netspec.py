"""Declarative network descriptions, layer graphs and parameter counting.

Three block families share one stem (1x1 convolution with bias, batch norm,
rectifier) and one value head (global average pooling, dense 50 with
rectifier, dense 1 with sigmoid):

* ``az_residual``: conv3x3+bias, BN, ReLU, conv3x3+bias, BN, add, ReLU.
* ``golois_residual``: conv3x3+bias, ReLU, conv3x3+bias, ReLU, add, BN.
* ``mobile_bottleneck``: conv1x1 expand, BN, ReLU, depthwise 3x3, BN, ReLU,
  conv1x1 squeeze, BN, add (no biases).

Policy heads are ``az_dense`` (conv1x1 to 2 planes with bias, BN, ReLU,
flatten, dense to size², softmax) and ``fully_convolutional`` (conv1x1 to one
plane without bias, ReLU, flatten, softmax).

Names follow ``family[.conv][.avg][.bin][.valW].blocks[.trunk[.filters]]``,
e.g. ``mobile.conv.avg.bin.40.128.512`` or ``a0.20.256``.
"""

import re
from dataclasses import dataclass
from typing import Dict, List, Tuple

import mobilego.utils.constants as c
import mobilego.utils.exception as e
from mobilego.utils import logging

logger = logging.get_logger(__name__)

FAMILIES = ("az_residual", "golois_residual", "mobile_bottleneck")
POLICY_HEADS = ("az_dense", "fully_convolutional")
VALUE_HEADS = ("gap",)
VALUE_LOSSES = ("mse", "bce")

# Combinations the naming scheme can express
VALID_HEADS = {
    "az_residual": ("az_dense",),
    "golois_residual": ("fully_convolutional",),
    "mobile_bottleneck": ("az_dense", "fully_convolutional"),
}

# Small networks: (blocks, trunk, filters)
SMALL = {
    ("a0", False): (10, 63, 0),
    ("a0", True): (13, 64, 0),
    ("mobile", False): (25, 64, 200),
    ("mobile", True): (33, 64, 200),
}

# Defaults when a name only gives the number of blocks
LARGE = {"a0": (256, 0), "mobile": (128, 512)}


@dataclass(frozen=True)
class NetworkSpec:
    """Architecture descriptor.

    ``expand_width`` is only used by mobile blocks; residual families use
    ``trunk_width`` as their convolution width. ``value_loss`` and
    ``value_weight`` are training tags carried by the network name.

    """

    block_family: str
    blocks: int
    trunk_width: int
    expand_width: int = 0
    policy_head: str = "az_dense"
    value_head: str = "gap"
    input_planes: int = c.N_PLANES
    board: int = c.DEFAULT_SIZE
    value_loss: str = "mse"
    value_weight: int = 1

    def __post_init__(self) -> None:
        if self.block_family not in FAMILIES:
            raise e.ValueError(f"`block_family` should be one of {FAMILIES}")
        if self.policy_head not in POLICY_HEADS:
            raise e.ValueError(f"`policy_head` should be one of {POLICY_HEADS}")
        if self.value_head not in VALUE_HEADS:
            raise e.ValueError(f"`value_head` should be one of {VALUE_HEADS}")
        if self.value_loss not in VALUE_LOSSES:
            raise e.ValueError(f"`value_loss` should be one of {VALUE_LOSSES}")
        if self.blocks < 1:
            raise e.ValueError("`blocks` should be >= 1")
        if self.trunk_width < 1 or self.input_planes < 1:
            raise e.ValueError("`trunk_width` and `input_planes` should be >= 1")
        if self.block_family == "mobile_bottleneck" and self.expand_width < 1:
            raise e.ValueError("`expand_width` should be >= 1 for mobile blocks")
        if not c.MIN_SIZE <= self.board <= c.MAX_SIZE:
            raise e.ValueError(f"`board` should be in [{c.MIN_SIZE}, {c.MAX_SIZE}]")
        if self.value_weight < 1:
            raise e.ValueError("`value_weight` should be >= 1")

    def validate(self) -> None:
        """Checks that the family and heads can be combined."""

        if self.policy_head not in VALID_HEADS[self.block_family]:
            raise e.ValueError(
                f"`{self.block_family}` blocks can not use the `{self.policy_head}` policy head"
            )

    @property
    def name(self) -> str:
        return format_name(self)


@dataclass(frozen=True)
class Layer:
    """A node of the layer graph."""

    name: str
    kind: str
    inputs: Tuple[str, ...] = ()
    in_channels: int = 0
    out_channels: int = 0
    kernel: int = 0
    bias: bool = False

    @property
    def params(self) -> int:
        """Stored values: weights, biases and the four batch-norm vectors."""

        if self.kind == "conv":
            count = self.kernel * self.kernel * self.in_channels * self.out_channels
            return count + (self.out_channels if self.bias else 0)
        if self.kind == "depthwise_conv":
            count = self.kernel * self.kernel * self.in_channels
            return count + (self.in_channels if self.bias else 0)
        if self.kind == "batch_norm":
            return 4 * self.out_channels
        if self.kind == "dense":
            return self.in_channels * self.out_channels + self.out_channels

        return 0


@dataclass(frozen=True)
class LayerGraph:
    """Ordered (topologically sorted) layers with a policy and a value output."""

    spec: NetworkSpec
    layers: Tuple[Layer, ...]
    policy: str
    value: str

    def __getitem__(self, name: str) -> Layer:
        for layer in self.layers:
            if layer.name == name:
                return layer

        raise e.ValueError(f"no layer named `{name}`")

    def count(self, kind: str) -> int:
        return sum(layer.kind == kind for layer in self.layers)

    def parameter_count(self) -> int:
        """Parameters enumerated layer by layer."""

        return sum(layer.params for layer in self.layers)

    def shapes(self) -> Dict[str, Tuple[int, ...]]:
        """Output shape of every layer, (channels, rows, cols) or (features,)."""

        board = self.spec.board
        shapes = {}
        for layer in self.layers:
            incoming = [shapes[i] for i in layer.inputs]

            if layer.kind == "input":
                shapes[layer.name] = (layer.out_channels, board, board)
            elif layer.kind in ("conv", "depthwise_conv", "batch_norm"):
                if incoming[0][0] != layer.in_channels:
                    raise e.BuildError(f"`{layer.name}` expects {layer.in_channels} channels")
                shapes[layer.name] = (layer.out_channels,) + incoming[0][1:]
            elif layer.kind == "add":
                if len(set(incoming)) != 1:
                    raise e.BuildError(f"`{layer.name}` adds tensors of shapes {incoming}")
                shapes[layer.name] = incoming[0]
            elif layer.kind == "global_avg_pool":
                shapes[layer.name] = (incoming[0][0],)
            elif layer.kind == "flatten":
                total = 1
                for d in incoming[0]:
                    total *= d
                shapes[layer.name] = (total,)
            elif layer.kind == "dense":
                if incoming[0] != (layer.in_channels,):
                    raise e.BuildError(f"`{layer.name}` expects {layer.in_channels} features")
                shapes[layer.name] = (layer.out_channels,)
            else:
                shapes[layer.name] = incoming[0]

        return shapes


class _Builder:
    def __init__(self) -> None:
        self.layers: List[Layer] = []

    def add(self, name: str, kind: str, inputs: Tuple[str, ...], **kwargs) -> str:
        self.layers.append(Layer(name, kind, inputs, **kwargs))

        return name


def _az_block(b: _Builder, x: str, i: int, width: int) -> str:
    p = f"block{i}"
    m = b.add(f"{p}_conv1", "conv", (x,), in_channels=width, out_channels=width, kernel=3, bias=True)
    m = b.add(f"{p}_bn1", "batch_norm", (m,), in_channels=width, out_channels=width)
    m = b.add(f"{p}_relu1", "relu", (m,))
    m = b.add(f"{p}_conv2", "conv", (m,), in_channels=width, out_channels=width, kernel=3, bias=True)
    m = b.add(f"{p}_bn2", "batch_norm", (m,), in_channels=width, out_channels=width)
    m = b.add(f"{p}_add", "add", (m, x))

    return b.add(f"{p}_relu2", "relu", (m,))


def _golois_block(b: _Builder, x: str, i: int, width: int) -> str:
    p = f"block{i}"
    m = b.add(f"{p}_conv1", "conv", (x,), in_channels=width, out_channels=width, kernel=3, bias=True)
    m = b.add(f"{p}_relu1", "relu", (m,))
    m = b.add(f"{p}_conv2", "conv", (m,), in_channels=width, out_channels=width, kernel=3, bias=True)
    m = b.add(f"{p}_relu2", "relu", (m,))
    m = b.add(f"{p}_add", "add", (m, x))

    return b.add(f"{p}_bn", "batch_norm", (m,), in_channels=width, out_channels=width)


def _bottleneck_block(b: _Builder, x: str, i: int, trunk: int, expand: int) -> str:
    p = f"block{i}"
    m = b.add(f"{p}_expand", "conv", (x,), in_channels=trunk, out_channels=expand, kernel=1)
    m = b.add(f"{p}_bn1", "batch_norm", (m,), in_channels=expand, out_channels=expand)
    m = b.add(f"{p}_relu1", "relu", (m,))
    m = b.add(f"{p}_depthwise", "depthwise_conv", (m,), in_channels=expand, out_channels=expand, kernel=3)
    m = b.add(f"{p}_bn2", "batch_norm", (m,), in_channels=expand, out_channels=expand)
    m = b.add(f"{p}_relu2", "relu", (m,))
    m = b.add(f"{p}_squeeze", "conv", (m,), in_channels=expand, out_channels=trunk, kernel=1)
    m = b.add(f"{p}_bn3", "batch_norm", (m,), in_channels=trunk, out_channels=trunk)

    return b.add(f"{p}_add", "add", (m, x))


def build_graph(spec: NetworkSpec) -> LayerGraph:
    """Builds the layer graph of a network.

    Args:
        spec: Architecture descriptor.

    Returns:
        The graph, with a size² policy output and a scalar value output.

    """

    spec.validate()

    t, n = spec.trunk_width, spec.board * spec.board
    b = _Builder()

    x = b.add("input", "input", (), out_channels=spec.input_planes)
    x = b.add("stem_conv", "conv", (x,), in_channels=spec.input_planes, out_channels=t, kernel=1, bias=True)
    x = b.add("stem_bn", "batch_norm", (x,), in_channels=t, out_channels=t)
    x = b.add("stem_relu", "relu", (x,))

    for i in range(spec.blocks):
        if spec.block_family == "az_residual":
            x = _az_block(b, x, i, t)
        elif spec.block_family == "golois_residual":
            x = _golois_block(b, x, i, t)
        else:
            x = _bottleneck_block(b, x, i, t, spec.expand_width)

    if spec.policy_head == "az_dense":
        p = b.add("policy_conv", "conv", (x,), in_channels=t, out_channels=2, kernel=1, bias=True)
        p = b.add("policy_bn", "batch_norm", (p,), in_channels=2, out_channels=2)
        p = b.add("policy_relu", "relu", (p,))
        p = b.add("policy_flatten", "flatten", (p,))
        p = b.add("policy_dense", "dense", (p,), in_channels=2 * n, out_channels=n)
    else:
        p = b.add("policy_conv", "conv", (x,), in_channels=t, out_channels=1, kernel=1)
        p = b.add("policy_relu", "relu", (p,))
        p = b.add("policy_flatten", "flatten", (p,))
    p = b.add("policy", "softmax", (p,))

    v = b.add("value_pool", "global_avg_pool", (x,))
    v = b.add("value_dense1", "dense", (v,), in_channels=t, out_channels=c.VALUE_HIDDEN)
    v = b.add("value_relu", "relu", (v,))
    v = b.add("value_dense2", "dense", (v,), in_channels=c.VALUE_HIDDEN, out_channels=1)
    v = b.add("value", "sigmoid", (v,))

    graph = LayerGraph(spec, tuple(b.layers), p, v)

    logger.debug(
        "Graph: %s | %d layers | %d parameters.",
        spec.name,
        len(graph.layers),
        graph.parameter_count(),
    )

    return graph


def count_params(spec: NetworkSpec) -> int:
    """Closed-form parameter count (batch norms count four values per channel).

    Args:
        spec: Architecture descriptor.

    Returns:
        The total number of parameters.

    """

    spec.validate()

    t, x, n = spec.trunk_width, spec.expand_width, spec.board * spec.board

    stem = spec.input_planes * t + t + 4 * t

    if spec.block_family == "az_residual":
        block = 2 * (9 * t * t + t) + 2 * 4 * t
    elif spec.block_family == "golois_residual":
        block = 2 * (9 * t * t + t) + 4 * t
    else:
        block = t * x + 4 * x + 9 * x + 4 * x + x * t + 4 * t

    if spec.policy_head == "az_dense":
        policy = 2 * t + 2 + 4 * 2 + 2 * n * n + n
    else:
        policy = t

    value = t * c.VALUE_HIDDEN + c.VALUE_HIDDEN + c.VALUE_HIDDEN + 1

    return stem + spec.blocks * block + policy + value


def parse_name(name: str, board: int = c.DEFAULT_SIZE) -> NetworkSpec:
    """Parses a network name into its descriptor.

    ``small`` stands for the small configurations; numbers are blocks, then
    widths. For mobile networks the smaller width is the trunk whatever the
    order they are written in.

    Args:
        name: Network name such as ``mobile.conv.avg.bin.33.200.64``.
        board: Board side length.

    Returns:
        The descriptor.

    """

    tokens = name.strip().lower().split(".")
    family = tokens[0]
    if family not in LARGE:
        raise e.ValueError(f"unknown network family in `{name}`")

    conv = small = False
    value_loss, value_weight = "mse", 1
    numbers = []

    for token in tokens[1:]:
        weight = re.fullmatch(r"val(\d+)", token)
        if token == "conv":
            conv = True
        elif token == "avg":
            continue
        elif token == "bin":
            value_loss = "bce"
        elif token == "small":
            small = True
        elif weight:
            value_weight = int(weight.group(1))
        elif token.isdigit():
            numbers.append(int(token))
        else:
            raise e.ValueError(f"unknown token `{token}` in `{name}`")

    if small:
        if numbers:
            raise e.ValueError(f"`{name}` mixes `small` with explicit sizes")
        blocks, trunk, expand = SMALL[(family, conv)]
    elif family == "a0" and len(numbers) in (1, 2):
        blocks = numbers[0]
        trunk = numbers[1] if len(numbers) == 2 else LARGE["a0"][0]
        expand = 0
    elif family == "mobile" and len(numbers) in (1, 3):
        blocks = numbers[0]
        trunk, expand = sorted(numbers[1:]) if len(numbers) == 3 else LARGE["mobile"]
    else:
        raise e.ValueError(f"`{name}` does not give blocks and widths")

    if family == "a0":
        block_family = "golois_residual" if conv else "az_residual"
    else:
        block_family = "mobile_bottleneck"

    return NetworkSpec(
        block_family=block_family,
        blocks=blocks,
        trunk_width=trunk,
        expand_width=expand,
        policy_head="fully_convolutional" if conv else "az_dense",
        board=board,
        value_loss=value_loss,
        value_weight=value_weight,
    )


def format_name(spec: NetworkSpec) -> str:
    """Canonical name, ``family[.conv.avg][.bin][.valW].blocks.trunk[.filters]``."""

    tokens = ["mobile" if spec.block_family == "mobile_bottleneck" else "a0"]
    if spec.policy_head == "fully_convolutional":
        tokens += ["conv", "avg"]
    if spec.value_loss == "bce":
        tokens.append("bin")
    if spec.value_weight != 1:
        tokens.append(f"val{spec.value_weight}")

    tokens += [str(spec.blocks), str(spec.trunk_width)]
    if spec.block_family == "mobile_bottleneck":
        tokens.append(str(spec.expand_width))

    return ".".join(tokens)
