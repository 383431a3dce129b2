import numpy as np
import pytest
import torch

from mobilego.models import netspec, network
from mobilego.utils import exception

SPECS = [
    netspec.NetworkSpec("mobile_bottleneck", 2, 8, 16, "fully_convolutional", board=9),
    netspec.NetworkSpec("mobile_bottleneck", 1, 8, 16, "az_dense", board=9),
    netspec.NetworkSpec("az_residual", 2, 8, board=9),
    netspec.NetworkSpec("golois_residual", 2, 8, policy_head="fully_convolutional", board=9),
]


def _inputs(batch, board=9, seed=0):
    rng = np.random.default_rng(seed)

    return rng.integers(0, 2, size=(batch, board, board, 21)).astype(np.float32)


@pytest.mark.parametrize("spec", SPECS)
def test_policy_value_net(spec):
    new_network = network.PolicyValueNet(spec)

    assert new_network.device == "cpu"
    assert new_network.count_parameters() == netspec.count_params(spec)

    policy, value = new_network.predict(_inputs(4))

    assert policy.shape == (4, 81)
    assert value.shape == (4, 1)
    assert torch.allclose(policy.sum(dim=1), torch.ones(4), atol=1e-5)
    assert ((value >= 0) & (value <= 1)).all()


def test_policy_value_net_from_name():
    new_network = network.PolicyValueNet("mobile.conv.avg.1.8.16")

    assert new_network.spec.board == 19
    assert new_network.count_parameters() == netspec.count_params(new_network.spec)

    with pytest.raises(exception.TypeError):
        new_network.spec = "mobile.conv.avg.1.8.16"


@pytest.mark.parametrize("spec", [SPECS[0], SPECS[2]])
def test_zero_heads(spec):
    new_network = network.PolicyValueNet(spec, zero_heads=True)
    policy, value = new_network.predict(_inputs(3))

    assert torch.allclose(policy, torch.full((3, 81), 1 / 81), atol=1e-6)
    assert torch.allclose(value, torch.full((3, 1), 0.5))


def test_predict_modes():
    new_network = network.PolicyValueNet(SPECS[0])
    x = _inputs(8)

    policy, _ = new_network.predict(x, mode="train")

    assert policy.requires_grad
    assert new_network.training

    policy, _ = new_network.predict(x)

    assert not policy.requires_grad
    assert not new_network.training

    with pytest.raises(exception.ValueError):
        new_network.predict(x, mode="eval")


def test_infer_is_batch_independent():
    new_network = network.PolicyValueNet(SPECS[1])

    # Running statistics away from their initial values
    new_network.predict(_inputs(16, seed=1), mode="train")

    x = _inputs(8)
    policy, value = new_network.predict(x)
    single_policy, single_value = new_network.predict(x[3:4])

    assert torch.allclose(policy[3], single_policy[0], atol=1e-5)
    assert torch.allclose(value[3], single_value[0], atol=1e-5)

    again, _ = new_network.predict(x)

    assert torch.equal(policy, again)


def test_forward_shape_errors():
    new_network = network.PolicyValueNet(SPECS[0])

    with pytest.raises(exception.SizeError):
        new_network(torch.zeros(2, 19, 19, 21))

    with pytest.raises(exception.SizeError):
        new_network(torch.zeros(9, 9, 21))

    with pytest.raises(exception.SizeError):
        new_network(torch.zeros(0, 9, 9, 21))


def test_regularized_weights():
    new_network = network.PolicyValueNet(SPECS[2])
    weights = new_network.regularized_weights()
    graph = new_network.graph

    assert len(weights) == graph.count("conv") + graph.count("depthwise_conv") + graph.count("dense")
    assert all(w.dim() >= 2 for w in weights)


def test_save_and_load(tmp_path):
    new_network = network.PolicyValueNet(SPECS[1])
    new_network.predict(_inputs(16), mode="train")
    path = tmp_path / "net.pt"

    new_network.save(path)
    loaded = network.PolicyValueNet.load(path)

    assert loaded.spec == new_network.spec

    state, loaded_state = new_network.state_dict(), loaded.state_dict()

    assert state.keys() == loaded_state.keys()
    assert all(torch.equal(state[k], loaded_state[k]) for k in state)

    x = _inputs(2)

    assert torch.equal(new_network.predict(x)[0], loaded.predict(x)[0])
