"""Inference throughput of networks by batch size.
"""

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Union

import pandas as pd
import torch
from tqdm import tqdm

import mobilego.utils.exception as e
from mobilego.models.network import PolicyValueNet
from mobilego.utils import logging

logger = logging.get_logger(__name__)


@dataclass(frozen=True)
class SpeedRow:
    """States per second of one network at one batch size (NaN when failed)."""

    name: str
    batch: int
    device: str
    speed: float
    failed: bool = False


@dataclass
class SpeedReport:
    """Rows of a throughput benchmark."""

    rows: List[SpeedRow] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(r.name, r.batch, r.device, r.speed) for r in self.rows],
            columns=["name", "batch", "device", "speed"],
        )

    def to_csv(self, path: Union[str, Path]) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.2f")


def _is_out_of_memory(error: Exception) -> bool:
    return isinstance(error, MemoryError) or "out of memory" in str(error).lower()


def _synchronize(device: str) -> None:
    if device == "cuda":
        torch.cuda.synchronize()


def throughput_bench(
    net: PolicyValueNet,
    batch_sizes: Sequence[int],
    device: str = "cpu",
    duration: float = 1.0,
    seed: int = 0,
    label: Optional[str] = None,
) -> SpeedReport:
    """Measures infer-mode forward passes per second for every batch size.

    Inputs are random 0/1 planes built before the clock starts; a warmup
    forward pass precedes each measurement. A batch size that runs out of
    memory gets a failed row and the benchmark goes on.

    Args:
        net: Network (spec and weights).
        batch_sizes: Batch sizes, each >= 1.
        device: `cpu` or `cuda`.
        duration: Minimum measured time per batch size, in seconds.
        seed: Seed of the synthetic inputs.
        label: Hardware name written in the rows (``device`` by default).

    Returns:
        One row per batch size.

    """

    if not batch_sizes or any(b < 1 for b in batch_sizes):
        raise e.ValueError("`batch_sizes` should be a non-empty list of sizes >= 1")
    if duration <= 0:
        raise e.ValueError("`duration` should be > 0")

    net.device = device
    net.to(device)

    spec = net.spec
    label = label or device
    generator = torch.Generator().manual_seed(seed)
    report = SpeedReport()

    for batch in tqdm(batch_sizes):
        try:
            x = torch.randint(
                0, 2, (batch, spec.board, spec.board, spec.input_planes), generator=generator
            ).float()
            x = x.to(device)

            net.predict(x, mode="infer")
            _synchronize(device)

            states, start = 0, time.perf_counter()
            while True:
                net.predict(x, mode="infer")
                _synchronize(device)
                states += batch

                elapsed = time.perf_counter() - start
                if elapsed >= duration:
                    break
        except (RuntimeError, MemoryError) as error:
            if not _is_out_of_memory(error):
                raise

            logger.warning("%s: batch %d does not fit on %s.", spec.name, batch, device)
            report.rows.append(SpeedRow(spec.name, batch, label, float("nan"), failed=True))
            if device == "cuda":
                torch.cuda.empty_cache()
            continue

        row = SpeedRow(spec.name, batch, label, states / elapsed)
        report.rows.append(row)

        logger.info("%s | batch %d | %s | %.2f states/s.", spec.name, batch, label, row.speed)

    return report
