"""This is mobilego main library. It gathers a Go rules engine, a
state encoder, residual and mobile-bottleneck policy/value networks,
their supervised training and the PUCT search used to make them play.
"""

__version__ = "1.0.0"
