"""Network descriptions and the torch policy-value network.
"""

from mobilego.models.netspec import (
    LayerGraph,
    NetworkSpec,
    build_graph,
    count_params,
    format_name,
    parse_name,
)
from mobilego.models.network import PolicyValueNet
