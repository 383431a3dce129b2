import pytest

from mobilego.training import config
from mobilego.utils import exception


def test_train_config():
    new_config = config.TrainConfig()

    assert new_config.value_loss == "mse"
    assert new_config.batch_size == 256
    assert new_config.total_epochs == 200
    assert new_config.momentum == 0.0
    assert "batch_size=256" in repr(new_config)


@pytest.mark.parametrize(
    "kwargs, error",
    [
        ({"value_loss": "l1"}, exception.ValueError),
        ({"value_weight": "4"}, exception.TypeError),
        ({"value_weight": 0}, exception.ValueError),
        ({"l2_weight": -1.0}, exception.ValueError),
        ({"batch_size": 0}, exception.ValueError),
        ({"batch_size": 2.5}, exception.TypeError),
        ({"epoch_samples": 0}, exception.ValueError),
        ({"schedule": ((1, 0.1),)}, exception.ValueError),
        ({"schedule": ((0, 0.1), (0, 0.01))}, exception.ValueError),
        ({"schedule": ((0, 0.0),)}, exception.ValueError),
        ({"total_epochs": -1}, exception.ValueError),
        ({"seed": "0"}, exception.TypeError),
        ({"momentum": 1.0}, exception.ValueError),
        ({"workers": -1}, exception.ValueError),
    ],
)
def test_train_config_errors(kwargs, error):
    with pytest.raises(error):
        config.TrainConfig(**kwargs)


@pytest.mark.parametrize(
    "epoch, lr",
    [(0, 0.005), (99, 0.005), (100, 0.0005), (149, 0.0005), (150, 0.00005), (199, 0.00005)],
)
def test_lr_at(epoch, lr):
    assert config.lr_at(config.TrainConfig(), epoch) == lr


def test_lr_at_is_non_increasing():
    cfg = config.TrainConfig()
    rates = [config.lr_at(cfg, epoch) for epoch in range(cfg.total_epochs)]

    assert all(a >= b for a, b in zip(rates, rates[1:]))

    with pytest.raises(exception.ValueError):
        config.lr_at(cfg, 200)

    with pytest.raises(exception.ValueError):
        config.lr_at(cfg, -1)
