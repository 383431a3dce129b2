"""Position evaluators and the cross-game batching evaluator.

An evaluator maps positions to a policy over the size² points and the
probability that White wins.
"""

import threading
from contextlib import contextmanager
from concurrent.futures import Future
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np

import mobilego.utils.constants as c
import mobilego.utils.exception as e
from mobilego.game.encoder import encode
from mobilego.game.goban import Position, tromp_taylor_score
from mobilego.models.network import PolicyValueNet
from mobilego.utils import logging

logger = logging.get_logger(__name__)


@dataclass(frozen=True)
class Evaluation:
    """Policy over the points of the board and P(White wins)."""

    policy: np.ndarray
    value: float


class Evaluator:
    """Base class of every evaluator."""

    def evaluate(self, positions: Sequence[Position]) -> List[Evaluation]:
        """Evaluates a batch of positions.

        Args:
            positions: Positions to evaluate.

        Returns:
            One evaluation per position, in order.

        """

        raise NotImplementedError

    def __call__(self, position: Position) -> Evaluation:
        return self.evaluate([position])[0]


class NetEvaluator(Evaluator):
    """Runs a network in infer mode."""

    def __init__(self, net: PolicyValueNet) -> None:
        """Initialization method.

        Args:
            net: Network whose board size matches the positions.

        """

        self.net = net

    def evaluate(self, positions: Sequence[Position]) -> List[Evaluation]:
        planes = np.stack([encode(p) for p in positions]).astype(np.float32)
        policy, value = self.net.predict(planes, mode="infer")

        policy = policy.cpu().numpy().astype(np.float64)
        value = value.cpu().numpy().reshape(-1)

        return [Evaluation(policy[i], float(value[i])) for i in range(len(positions))]


class UniformEvaluator(Evaluator):
    """Uniform policy and a constant value."""

    def __init__(self, value: float = 0.5) -> None:
        if not 0 <= value <= 1:
            raise e.ValueError("`value` should be in [0, 1]")

        self.value = value

    def evaluate(self, positions: Sequence[Position]) -> List[Evaluation]:
        return [
            Evaluation(np.full(p.size * p.size, 1.0 / (p.size * p.size)), self.value)
            for p in positions
        ]


class ScoreEvaluator(Evaluator):
    """Uniform policy; the value scores the board as it stands.

    The value is 1 when White leads on Tromp-Taylor area, 0 when Black does
    and 0.5 on a tie. ``flip`` reverses the color orientation.

    """

    def __init__(self, komi: float = c.KOMI, flip: bool = False) -> None:
        self.komi = komi
        self.flip = flip

    def evaluate(self, positions: Sequence[Position]) -> List[Evaluation]:
        results = []
        for p in positions:
            score = tromp_taylor_score(p, self.komi)
            value = 0.5 if score == 0 else float(score > 0)
            if self.flip:
                value = 1.0 - value

            results.append(Evaluation(np.full(p.size * p.size, 1.0 / (p.size * p.size)), value))

        return results


class BatchedEvaluator(Evaluator):
    """Gathers requests of concurrent games into shared forward passes.

    Games register as clients. A batch is dispatched, by the thread whose
    request completes it, as soon as ``max_batch`` requests are pending or
    every registered client without a request in flight is waiting. A lone
    client is therefore never blocked.

    """

    def __init__(self, inner: Evaluator, max_batch: int = 64) -> None:
        """Initialization method.

        Args:
            inner: Evaluator running the batches.
            max_batch: Maximum number of states per forward pass.

        """

        logger.info("Creating class: BatchedEvaluator.")

        self.inner = inner
        self.max_batch = max_batch

        self._lock = threading.Lock()
        self._pending: List[Tuple[Position, Future]] = []
        self._clients = 0
        self._in_flight = 0
        self._closed = False
        self.batch_sizes: List[int] = []

        logger.info("Class created.")
        logger.debug("Max batch: %d.", max_batch)

    @property
    def max_batch(self) -> int:
        """Maximum number of states per forward pass."""

        return self._max_batch

    @max_batch.setter
    def max_batch(self, max_batch: int) -> None:
        if not isinstance(max_batch, int):
            raise e.TypeError("`max_batch` should be an integer")
        if max_batch < 1:
            raise e.ValueError("`max_batch` should be >= 1")

        self._max_batch = max_batch

    @property
    def mean_batch_size(self) -> float:
        """Mean size of the dispatched batches."""

        return float(np.mean(self.batch_sizes)) if self.batch_sizes else 0.0

    def register(self) -> None:
        """Adds a client (a game that will keep submitting requests)."""

        with self._lock:
            self._clients += 1

    def unregister(self) -> None:
        """Removes a client, possibly releasing a batch the others wait for."""

        with self._lock:
            self._clients = max(self._clients - 1, 0)
            batch = self._take()

        self._run(batch)

    @contextmanager
    def client(self) -> Iterator[None]:
        """Registers the caller for the duration of a block.

        A client must keep submitting until it leaves the block: a game holds
        it only while its own side is searching, never while it waits on
        another evaluator.

        """

        self.register()
        try:
            yield
        finally:
            self.unregister()

    def _threshold(self) -> int:
        return max(1, min(self.max_batch, self._clients - self._in_flight))

    def _take(self) -> List[Tuple[Position, Future]]:
        """Pops a batch when the dispatch condition holds (lock held)."""

        if not self._pending or len(self._pending) < self._threshold():
            return []

        batch = self._pending[: self.max_batch]
        del self._pending[: self.max_batch]
        self._in_flight += len(batch)
        self.batch_sizes.append(len(batch))

        return batch

    def _run(self, batch: List[Tuple[Position, Future]]) -> None:
        if not batch:
            return

        failure, results = None, []
        try:
            results = self.inner.evaluate([p for p, _ in batch])
        except Exception as error:
            failure = error

        # Released before the results so requesters resubmit against the new count
        with self._lock:
            self._in_flight -= len(batch)

        for i, (_, future) in enumerate(batch):
            if failure is not None:
                future.set_exception(failure)
            else:
                future.set_result(results[i])

    def submit(self, position: Position) -> Future:
        """Queues a position and returns the future of its evaluation."""

        future = Future()
        with self._lock:
            if self._closed:
                raise e.CancelledError("evaluator is shut down")

            self._pending.append((position, future))
            batch = self._take()

        self._run(batch)

        return future

    def evaluate(self, positions: Sequence[Position]) -> List[Evaluation]:
        futures = [self.submit(p) for p in positions]

        return [f.result() for f in futures]

    def shutdown(self) -> None:
        """Refuses new requests and cancels the pending ones."""

        with self._lock:
            self._closed = True
            pending, self._pending = self._pending, []

        for _, future in pending:
            future.set_exception(e.CancelledError("evaluator shut down with requests pending"))

        logger.debug("Evaluator shut down | %d requests cancelled.", len(pending))
