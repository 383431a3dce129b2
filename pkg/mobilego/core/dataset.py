"""Dataset-related classes.
"""

from typing import Iterator, List, Tuple

import numpy as np
import torch

import mobilego.utils.exception as e
from mobilego.game.encoder import Sample, make_sample
from mobilego.game.records import Corpus, sample_positions
from mobilego.utils import logging

logger = logging.get_logger(__name__)

Item = Tuple[torch.Tensor, torch.Tensor, torch.Tensor]


def _to_tensors(sample: Sample) -> Item:
    return (
        torch.from_numpy(sample.input.astype(np.float32)),
        torch.tensor(sample.policy_target, dtype=torch.int64),
        torch.tensor(sample.value_target, dtype=torch.float32),
    )


class SampleDataset(torch.utils.data.Dataset):
    """A map-style dataset over a fixed list of samples."""

    def __init__(self, samples: List[Sample], show_log: bool = True) -> None:
        """Initialization method.

        Args:
            samples: Encoded samples.
            show_log: Whether to show log information or not.

        """

        self.samples = samples

        if show_log:
            logger.info("Creating class: SampleDataset.")
            logger.info("Class created.")
            logger.debug("Samples: %d.", len(self.samples))

    @property
    def samples(self) -> List[Sample]:
        """Encoded samples."""

        return self._samples

    @samples.setter
    def samples(self, samples: List[Sample]) -> None:
        samples = list(samples)
        if not samples:
            raise e.SizeError("`samples` should not be empty")

        self._samples = samples

    def __getitem__(self, idx: int) -> Item:
        """A private method that will be the base for PyTorch's iterator getting a new sample.

        Args:
            idx: The idx of desired sample.

        Returns:
            Input planes, policy target and value target tensors.

        """

        return _to_tensors(self.samples[idx])

    def __len__(self) -> int:
        return len(self.samples)


class CorpusStream(torch.utils.data.IterableDataset):
    """Random samples drawn from a corpus, one epoch worth per iteration.

    Each data-loading worker encodes its own share of the epoch with a
    generator seeded from (seed, epoch, worker id), so a run is reproducible
    for a fixed number of workers.

    """

    def __init__(self, corpus: Corpus, epoch_samples: int, seed: int = 0) -> None:
        """Initialization method.

        Args:
            corpus: Training corpus.
            epoch_samples: Number of samples yielded per iteration.
            seed: Random seed.

        """

        if corpus.n_states == 0:
            raise e.ValueError("`corpus` should hold at least one sampleable state")
        if epoch_samples < 1:
            raise e.ValueError("`epoch_samples` should be >= 1")

        self.corpus = corpus
        self.epoch_samples = epoch_samples
        self.seed = seed
        self.epoch = 0

        logger.debug(
            "Stream: %d states | %d samples per epoch | seed %d.",
            corpus.n_states,
            epoch_samples,
            seed,
        )

    def set_epoch(self, epoch: int) -> None:
        """Selects the epoch whose samples the next iteration draws."""

        self.epoch = epoch

    def __len__(self) -> int:
        return self.epoch_samples

    def __iter__(self) -> Iterator[Item]:
        info = torch.utils.data.get_worker_info()
        worker, workers = (info.id, info.num_workers) if info else (0, 1)

        share = self.epoch_samples // workers + (worker < self.epoch_samples % workers)
        rng = np.random.default_rng([self.seed, self.epoch, worker])

        for game, ply, s in sample_positions(self.corpus, share, rng):
            yield _to_tensors(make_sample(self.corpus.games[game], ply, s))
