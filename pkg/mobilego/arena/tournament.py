"""Games between evaluators and round-robin tournaments.
"""

from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import ContextManager, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

import mobilego.utils.constants as c
import mobilego.utils.exception as e
from mobilego.game.goban import Color, GameRecord, Move, Position, new_position, play, tromp_taylor_score
from mobilego.math.metrics import winrate_sigma
from mobilego.search.evaluator import BatchedEvaluator, Evaluator
from mobilego.search.puct import Budget, policy_move, puct_search, select_move
from mobilego.utils import logging

logger = logging.get_logger(__name__)


@dataclass(frozen=True)
class Player:
    """A named evaluator taking part in games."""

    name: str
    evaluator: Evaluator


@dataclass(frozen=True)
class GameOutcome:
    """Winner, final Tromp-Taylor score and full record of a game.

    ``failure`` describes the error of a side whose search failed; that side
    loses the game.

    """

    winner: Color
    record: GameRecord
    score: float
    failure: Optional[str] = None


def choose_move(
    evaluator: Evaluator,
    p: Position,
    budget: Optional[Budget],
    rng: np.random.Generator,
    randomize: bool = True,
    komi: float = c.KOMI,
) -> Move:
    """Picks a move with PUCT, or straight from the policy when ``budget`` is None."""

    if budget is None:
        return policy_move(p, evaluator)

    return select_move(puct_search(p, evaluator, budget, komi=komi), randomize, rng)


def _turn(evaluator: Evaluator) -> ContextManager:
    """Holds a batched evaluator's client slot while its side chooses a move."""

    if isinstance(evaluator, BatchedEvaluator):
        return evaluator.client()

    return nullcontext()


def play_game(
    black: Player,
    white: Player,
    budget: Optional[Budget],
    seed: int = 0,
    size: int = c.DEFAULT_SIZE,
    komi: float = c.KOMI,
    max_moves: Optional[int] = None,
    randomize: bool = True,
) -> GameOutcome:
    """Plays one game until two passes or the move cap.

    Args:
        black: Player with Black.
        white: Player with White.
        budget: Search budget per move, None for policy-only play.
        seed: Seed of the move randomization.
        size: Board side length.
        komi: Komi.
        max_moves: Ply cap, 3·size² by default; capped games are scored as they stand.
        randomize: Whether the second best move may be played.

    Returns:
        The outcome.

    """

    max_moves = 3 * size * size if max_moves is None else max_moves
    rng = np.random.default_rng(seed)

    p = new_position(size)
    moves, failure, winner = [], None, None

    while not p.is_over and len(moves) < max_moves:
        player = black if p.to_move == Color.BLACK else white

        try:
            with _turn(player.evaluator):
                move = choose_move(player.evaluator, p, budget, rng, randomize, komi)
            p = play(p, move)
        except Exception as error:
            failure = f"{player.name}: {error}"
            winner = p.to_move.opponent

            logger.warning("Game aborted, %s loses: %s.", p.to_move.name.lower(), error)
            break

        moves.append(move)

    score = tromp_taylor_score(p, komi)
    if winner is None:
        winner = Color.WHITE if score > 0 else Color.BLACK

    record = GameRecord(
        size=size,
        result=1 if winner == Color.WHITE else 0,
        moves=tuple(moves),
        komi=komi,
    )

    return GameOutcome(winner, record, score, failure)


@dataclass(frozen=True)
class Standing:
    """Games, wins, winrate and its standard error for one player."""

    name: str
    games: int
    wins: int

    @property
    def winrate(self) -> float:
        return self.wins / self.games if self.games else 0.0

    @property
    def sigma(self) -> float:
        return winrate_sigma(self.winrate, self.games) if self.games else 0.0


class TournamentTable:
    """Standings of a tournament, sorted by winrate."""

    def __init__(self, standings: Sequence[Standing], outcomes: Sequence[GameOutcome] = ()) -> None:
        """Initialization method.

        Args:
            standings: One entry per player.
            outcomes: Every game played.

        """

        self.standings = sorted(standings, key=lambda s: (-s.winrate, s.name))
        self.outcomes = list(outcomes)

    def __getitem__(self, name: str) -> Standing:
        for standing in self.standings:
            if standing.name == name:
                return standing

        raise e.ValueError(f"no player named `{name}`")

    def __len__(self) -> int:
        return len(self.standings)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(s.name, s.games, s.winrate, s.sigma) for s in self.standings],
            columns=["name", "games", "winrate", "sigma"],
        )

    def to_csv(self, path: Union[str, Path]) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.3f")


def round_robin(
    players: Sequence[Player],
    games_per_pairing: int,
    budget: Optional[Budget],
    seed: int = 0,
    size: int = c.DEFAULT_SIZE,
    komi: float = c.KOMI,
    max_moves: Optional[int] = None,
    workers: int = 1,
) -> TournamentTable:
    """Plays every pair of players against each other.

    Within a pairing the first player takes Black on even-indexed games, so
    colors alternate and each side plays both colors equally (±1).

    Args:
        players: At least two players with distinct names.
        games_per_pairing: Games per pair of players.
        budget: Search budget per move, None for policy-only play.
        seed: Base seed; game ``k`` uses ``seed + k``.
        size: Board side length.
        komi: Komi.
        max_moves: Ply cap per game.
        workers: Games played in parallel.

    Returns:
        The standings.

    """

    if len(players) < 2:
        raise e.SizeError("`players` should hold at least two players")
    if len({p.name for p in players}) != len(players):
        raise e.ValueError("`players` should have distinct names")
    if games_per_pairing < 1:
        raise e.ValueError("`games_per_pairing` should be >= 1")

    schedule = []
    for a, b in combinations(players, 2):
        for k in range(games_per_pairing):
            schedule.append((a, b) if k % 2 == 0 else (b, a))

    def run(game: int) -> GameOutcome:
        black, white = schedule[game]

        return play_game(black, white, budget, seed + game, size, komi, max_moves)

    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        outcomes = list(tqdm(pool.map(run, range(len(schedule))), total=len(schedule)))

    games = {p.name: 0 for p in players}
    wins = {p.name: 0 for p in players}
    for (black, white), outcome in zip(schedule, outcomes):
        games[black.name] += 1
        games[white.name] += 1
        wins[black.name if outcome.winner == Color.BLACK else white.name] += 1

    table = TournamentTable([Standing(n, games[n], wins[n]) for n in games], outcomes)

    for s in table.standings:
        logger.info("%s: %d games | winrate %.3f ± %.3f.", s.name, s.games, s.winrate, s.sigma)

    return table
