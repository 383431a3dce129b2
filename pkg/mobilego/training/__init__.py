"""Supervised training: configuration, losses and the training loop.
"""

from mobilego.training.config import TrainConfig, lr_at
from mobilego.training.losses import Metrics, loss
from mobilego.training.trainer import evaluate, fit, train
