"""PUCT Monte Carlo tree search and tournament move selection.
"""

import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

import mobilego.utils.constants as c
import mobilego.utils.exception as e
from mobilego.game.goban import Color, Move, Position, legal_moves, play, tromp_taylor_score
from mobilego.search.evaluator import Evaluation, Evaluator
from mobilego.utils import logging

logger = logging.get_logger(__name__)


@dataclass(frozen=True)
class Budget:
    """Search budget: a number of simulations or a wall-clock duration."""

    evaluations: Optional[int] = None
    milliseconds: Optional[float] = None

    def __post_init__(self) -> None:
        if (self.evaluations is None) == (self.milliseconds is None):
            raise e.ValueError("`Budget` takes exactly one of `evaluations` and `milliseconds`")
        amount = self.evaluations if self.evaluations is not None else self.milliseconds
        if amount <= 0:
            raise e.ValueError("`Budget` should be > 0")


class Node:
    """A search node holding the statistics of the edges to its children.

    ``value_sum[i]`` accumulates values seen from the perspective of the side
    to move at this node, so the mean of child ``i`` is its win expectation
    for the player choosing it.

    """

    __slots__ = ("position", "moves", "prior", "visits", "value_sum", "children", "n", "terminal")

    def __init__(self, position: Position) -> None:
        self.position = position
        self.moves: List[Move] = []
        self.prior = np.zeros(0)
        self.visits = np.zeros(0, dtype=np.int64)
        self.value_sum = np.zeros(0)
        self.children: Dict[int, "Node"] = {}
        self.n = 0
        self.terminal = position.is_over

    @property
    def expanded(self) -> bool:
        return bool(self.moves)

    def expand(self, evaluation: Evaluation) -> None:
        """Creates the edges of every legal move.

        The pass gets the smallest legal point prior, then priors are
        renormalized over the legal moves.

        """

        size = self.position.size
        self.moves = legal_moves(self.position)

        points = [m.index(size) for m in self.moves if not m.is_pass]
        prior = np.asarray([evaluation.policy[i] for i in points], dtype=np.float64)
        pass_prior = prior.min() if len(prior) else 1.0
        prior = np.append(prior, pass_prior)

        total = prior.sum()
        self.prior = prior / total if total > 0 else np.full(len(prior), 1.0 / len(prior))
        self.visits = np.zeros(len(self.moves), dtype=np.int64)
        self.value_sum = np.zeros(len(self.moves))

    def q(self, fpu: float) -> np.ndarray:
        """Mean value of every edge, ``fpu`` for unvisited ones."""

        q = np.full(len(self.moves), fpu, dtype=np.float64)
        visited = self.visits > 0
        q[visited] = self.value_sum[visited] / self.visits[visited]

        return q

    def select(self, c_puct: float, fpu: float) -> int:
        """Index of the child maximizing Q + U (lowest index on ties)."""

        u = c_puct * self.prior * math.sqrt(self.n) / (1 + self.visits)

        return int(np.argmax(self.q(fpu) + u))


@dataclass(frozen=True)
class RankedMove:
    """A root move with its search statistics."""

    move: Move
    visits: int
    q: float
    prior: float


@dataclass(frozen=True)
class SearchResult:
    """Root moves ranked by visits, the root value and the work done.

    ``root_value`` is the win expectation of the side to move at the root.

    """

    moves: Tuple[RankedMove, ...]
    root_value: float
    evaluations: int
    root: Node

    @property
    def best(self) -> Move:
        return self.moves[0].move


class PUCT:
    """Predictor + UCT search over an evaluator."""

    def __init__(
        self,
        evaluator: Evaluator,
        c_puct: float = c.C_PUCT,
        fpu: float = c.FPU,
        komi: float = c.KOMI,
    ) -> None:
        """Initialization method.

        Args:
            evaluator: Position evaluator.
            c_puct: Exploration constant.
            fpu: Value of unvisited children.
            komi: Komi used to score finished games.

        """

        self.evaluator = evaluator
        self.c_puct = c_puct
        self.fpu = fpu
        self.komi = komi

    @property
    def c_puct(self) -> float:
        """Exploration constant."""

        return self._c_puct

    @c_puct.setter
    def c_puct(self, c_puct: float) -> None:
        if not isinstance(c_puct, (float, int)):
            raise e.TypeError("`c_puct` should be a float or integer")
        if c_puct <= 0:
            raise e.ValueError("`c_puct` should be > 0")

        self._c_puct = c_puct

    @property
    def fpu(self) -> float:
        """Value of unvisited children."""

        return self._fpu

    @fpu.setter
    def fpu(self, fpu: float) -> None:
        if not 0 <= fpu <= 1:
            raise e.ValueError("`fpu` should be in [0, 1]")

        self._fpu = fpu

    def _leaf_value(self, node: Node) -> float:
        """P(White wins) at a leaf, expanding it when the game goes on."""

        if node.terminal:
            score = tromp_taylor_score(node.position, self.komi)

            return 0.5 if score == 0 else float(score > 0)

        evaluation = self.evaluator(node.position)
        node.expand(evaluation)

        return evaluation.value

    def simulate(self, root: Node) -> None:
        """Runs one selection, expansion, evaluation and backup."""

        node, path = root, []
        while node.expanded:
            i = node.select(self.c_puct, self.fpu)
            path.append((node, i))

            child = node.children.get(i)
            if child is None:
                child = Node(play(node.position, node.moves[i]))
                node.children[i] = child
            node = child

        v = self._leaf_value(node)
        node.n += 1

        for parent, i in reversed(path):
            q = v if parent.position.to_move == Color.WHITE else 1.0 - v
            parent.visits[i] += 1
            parent.value_sum[i] += q
            parent.n += 1

    def search(self, p: Position, budget: Budget) -> SearchResult:
        """Searches a position.

        Args:
            p: Position, game not over.
            budget: Number of simulations or milliseconds.

        Returns:
            The ranked root moves.

        """

        if p.is_over:
            raise e.RuleError("game over", "can not search a finished game")

        root = Node(p)
        deadline = None
        if budget.milliseconds is not None:
            deadline = time.monotonic() + budget.milliseconds / 1000

        simulations = 0
        while True:
            self.simulate(root)
            simulations += 1

            if deadline is None and simulations >= budget.evaluations:
                break
            if deadline is not None and time.monotonic() >= deadline:
                break

        q = root.q(self.fpu)
        size = p.size
        order = sorted(
            range(len(root.moves)),
            key=lambda i: (-root.visits[i], -root.prior[i], root.moves[i].index(size)),
        )
        ranked = tuple(
            RankedMove(root.moves[i], int(root.visits[i]), float(q[i]), float(root.prior[i]))
            for i in order
        )

        visits = root.visits.sum()
        root_value = float(root.value_sum.sum() / visits) if visits else self.fpu

        logger.debug(
            "Search: %d simulations | best %s (%d visits) | value %.3f.",
            simulations,
            ranked[0].move,
            ranked[0].visits,
            root_value,
        )

        return SearchResult(ranked, root_value, simulations, root)


def puct_search(
    p: Position,
    evaluator: Evaluator,
    budget: Budget,
    c_puct: float = c.C_PUCT,
    fpu: float = c.FPU,
    komi: float = c.KOMI,
) -> SearchResult:
    """Searches a position with a fresh tree.

    Args:
        p: Position, game not over.
        evaluator: Position evaluator.
        budget: Number of simulations or milliseconds.
        c_puct: Exploration constant.
        fpu: Value of unvisited children.
        komi: Komi used to score finished games.

    Returns:
        The ranked root moves.

    """

    return PUCT(evaluator, c_puct, fpu, komi).search(p, budget)


def select_move(r: SearchResult, randomize: bool, rng: np.random.Generator) -> Move:
    """Picks the move to play from a search.

    With ``randomize``, the second most visited move is a candidate when it
    got more than half the visits of the best one, and is then played with
    probability 0.5.

    Args:
        r: Search result.
        randomize: Whether the second best move may be played.
        rng: Random generator.

    Returns:
        The move.

    """

    if not r.moves:
        raise e.SizeError("`r` should hold at least one move")

    best = r.moves[0]
    if not randomize or len(r.moves) < 2:
        return best.move

    second = r.moves[1]
    if second.visits > best.visits / 2 and rng.random() < 0.5:
        return second.move

    return best.move


def policy_move(p: Position, evaluator: Evaluator) -> Move:
    """Most probable legal point move of the policy (a pass when none is left)."""

    if p.is_over:
        raise e.RuleError("game over", "can not pick a move in a finished game")

    policy = evaluator(p).policy
    moves = [m for m in legal_moves(p) if not m.is_pass]
    if not moves:
        return Move.pass_move()

    return max(moves, key=lambda m: (policy[m.index(p.size)], -m.index(p.size)))
