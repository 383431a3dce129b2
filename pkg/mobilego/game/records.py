"""Game corpora: SGF ingestion, binary cache, sampling and validation split.
"""

import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
from sgfmill import sgf
from tqdm import tqdm

import mobilego.utils.constants as c
import mobilego.utils.exception as e
from mobilego.game.encoder import Sample, make_sample
from mobilego.game.goban import Color, GameRecord, Move, new_position, play
from mobilego.utils import logging

logger = logging.get_logger(__name__)

MAGIC = b"GORC"
VERSION = 1

_HEADER = struct.Struct("<4sBBI")
_GAME = struct.Struct("<BhH")


class Corpus:
    """An immutable list of game records with a cumulative state index.

    ``cumulative_state_index[i]`` is the number of sampleable (non-pass)
    plies in games ``0..i``.

    """

    def __init__(self, games: Sequence[GameRecord]) -> None:
        """Initialization method.

        Args:
            games: Game records, all on the same board size.

        """

        self.games = tuple(games)

        sizes = {g.size for g in self.games}
        if len(sizes) > 1:
            raise e.ValueError(f"`games` should share one board size, got {sorted(sizes)}")

        counts = [len(self._plies(g)) for g in self.games]
        if any(count == 0 for count in counts):
            raise e.ValueError("every game should hold at least one point move")

        self.cumulative_state_index = np.cumsum(np.asarray(counts, dtype=np.int64))

        logger.debug("Corpus: %d games | %d states.", len(self.games), self.n_states)

    @staticmethod
    def _plies(game: GameRecord) -> np.ndarray:
        return np.asarray(
            [i for i, m in enumerate(game.moves) if not m.is_pass], dtype=np.int64
        )

    @cached_property
    def point_plies(self) -> Tuple[np.ndarray, ...]:
        """Per game, the indices of its point moves."""

        return tuple(self._plies(g) for g in self.games)

    @property
    def size(self) -> int:
        return self.games[0].size if self.games else 0

    @property
    def n_states(self) -> int:
        return int(self.cumulative_state_index[-1]) if len(self.games) else 0

    def locate(self, state: int) -> Tuple[int, int]:
        """Maps a global state number to (game, ply)."""

        if not 0 <= state < self.n_states:
            raise e.ValueError(f"`state` should be in [0, {self.n_states})")

        game = int(np.searchsorted(self.cumulative_state_index, state, side="right"))
        offset = state - (int(self.cumulative_state_index[game - 1]) if game else 0)

        return game, int(self.point_plies[game][offset])

    def __len__(self) -> int:
        return len(self.games)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented

        return self.games == other.games


@dataclass
class Split:
    """Training corpus and one validation sample per held-out game."""

    train: Corpus
    validation: List[Sample]
    holdout_games: int
    train_ids: Tuple[int, ...] = field(default_factory=tuple)
    holdout_ids: Tuple[int, ...] = field(default_factory=tuple)


def parse_sgf(text: Union[bytes, str]) -> GameRecord:
    """Parses one SGF game.

    Args:
        text: SGF content.

    Returns:
        The record; moves are replayed to check legality.

    """

    if isinstance(text, str):
        text = text.encode("utf-8")

    try:
        game = sgf.Sgf_game.from_bytes(text)
    except ValueError as error:
        raise e.RejectError("parse", str(error))

    size = game.get_size()
    root = game.get_root()

    if root.has_property("HA") and int(root.get("HA") or 0) > 1:
        raise e.RejectError("handicap", f"HA[{root.get('HA')}]")
    if root.has_property("AB") or root.has_property("AW"):
        raise e.RejectError("handicap", "setup stones")

    winner = game.get_winner()
    if winner is None:
        raise e.RejectError("no result")
    result = 0 if winner == "b" else 1

    try:
        komi = game.get_komi() if root.has_property("KM") else c.KOMI
    except ValueError as error:
        raise e.RejectError("parse", str(error))

    moves = []
    try:
        position = new_position(size)
    except e.ValueError:
        raise e.RejectError("size", f"SZ[{size}]")

    for node in game.get_main_sequence()[1:]:
        try:
            color, point = node.get_move()
        except ValueError as error:
            raise e.RejectError("bad coordinate", str(error))

        if color is None:
            continue

        # sgfmill counts rows from the bottom edge
        move = Move.pass_move() if point is None else Move.play(size - 1 - point[0], point[1])

        if (color == "b") != (position.to_move == Color.BLACK):
            raise e.RejectError("order", f"{color} played out of turn")

        try:
            position = play(position, move)
        except e.RuleError as error:
            raise e.RejectError(error.rule, str(error))
        moves.append(move)

    if not any(not m.is_pass for m in moves):
        raise e.RejectError("empty")

    return GameRecord(size=size, result=result, moves=tuple(moves), komi=komi)


def ingest(paths: Iterable[Path]) -> Tuple[Corpus, Dict[str, int]]:
    """Parses many SGF files, counting rejections instead of failing.

    Args:
        paths: SGF files.

    Returns:
        The corpus of accepted games and the rejection count per reason.

    """

    games, rejected = [], {}
    for path in tqdm(list(paths)):
        try:
            games.append(parse_sgf(Path(path).read_bytes()))
        except e.RejectError as error:
            rejected[error.reason] = rejected.get(error.reason, 0) + 1

    if games:
        size = max(set(g.size for g in games), key=[g.size for g in games].count)
        kept = [g for g in games if g.size == size]
        if len(kept) < len(games):
            rejected["size"] = rejected.get("size", 0) + len(games) - len(kept)
        games = kept

    logger.info("Accepted %d games | rejected: %s.", len(games), rejected)

    return Corpus(games), rejected


def write_cache(corpus: Corpus, path: Union[str, Path]) -> None:
    """Writes a corpus to the little-endian binary cache.

    Args:
        corpus: Corpus, non-empty.
        path: Output file.

    """

    if not len(corpus):
        raise e.ValueError("`corpus` should hold at least one game")

    size = corpus.size
    chunks = [_HEADER.pack(MAGIC, VERSION, size, len(corpus))]
    for game in corpus.games:
        indices = np.asarray([m.index(size) for m in game.moves], dtype="<u2")
        chunks.append(_GAME.pack(game.result, int(round(game.komi * 2)), len(indices)))
        chunks.append(indices.tobytes())

    Path(path).write_bytes(b"".join(chunks))

    logger.debug("Cache written: %s (%d games).", path, len(corpus))


def read_cache(path: Union[str, Path]) -> Corpus:
    """Reads a corpus back from the binary cache.

    Args:
        path: Cache file.

    Returns:
        The corpus, equal to the one written.

    """

    data = Path(path).read_bytes()

    if len(data) < _HEADER.size:
        raise e.FormatError(len(data), "truncated header")

    magic, version, size, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise e.FormatError(0, f"bad magic {magic!r}")
    if version != VERSION:
        raise e.FormatError(4, f"unsupported version {version}")
    if not c.MIN_SIZE <= size <= c.MAX_SIZE:
        raise e.FormatError(5, f"board size {size} outside [{c.MIN_SIZE}, {c.MAX_SIZE}]")

    offset = _HEADER.size
    games = []
    for _ in range(count):
        if offset + _GAME.size > len(data):
            raise e.FormatError(offset, "truncated game header")
        result, komi2, n_moves = _GAME.unpack_from(data, offset)
        offset += _GAME.size

        end = offset + 2 * n_moves
        if end > len(data):
            raise e.FormatError(offset, "truncated move list")
        indices = np.frombuffer(data, dtype="<u2", count=n_moves, offset=offset)
        if n_moves and int(indices.max()) > size * size:
            raise e.FormatError(offset, "move index off the board")
        offset = end

        try:
            record = GameRecord(
                size=size,
                result=result,
                moves=tuple(Move.from_index(int(i), size) for i in indices),
                komi=komi2 / 2,
            )
        except e.ValueError:
            raise e.FormatError(offset, f"bad result {result}")
        games.append(record)

    if offset != len(data):
        raise e.FormatError(offset, "trailing bytes")

    return Corpus(games)


def split(corpus: Corpus, holdout_games: int, seed: int = 0) -> Split:
    """Holds whole games out for validation.

    Args:
        corpus: Corpus to split.
        holdout_games: Number of games kept out of training.
        seed: Random seed.

    Returns:
        The split; each held-out game gives one sample at a random point ply,
        without symmetry.

    """

    if not 0 <= holdout_games < max(len(corpus), 1):
        raise e.ValueError(f"`holdout_games` should be in [0, {len(corpus)})")

    rng = np.random.default_rng(seed)
    holdout = sorted(rng.choice(len(corpus), size=holdout_games, replace=False).tolist())
    held = set(holdout)
    train_ids = tuple(i for i in range(len(corpus)) if i not in held)

    validation = []
    for i in holdout:
        plies = corpus.point_plies[i]
        ply = int(plies[rng.integers(len(plies))])
        validation.append(make_sample(corpus.games[i], ply, 0))

    train = Corpus([corpus.games[i] for i in train_ids]) if holdout else corpus

    logger.info("Split: %d training games | %d validation samples.", len(train), len(validation))

    return Split(train, validation, holdout_games, train_ids, tuple(holdout))


def sample_positions(corpus: Corpus, n: int, rng: np.random.Generator) -> List[Tuple[int, int, int]]:
    """Draws (game, ply, symmetry) triples uniformly over sampleable states."""

    if corpus.n_states == 0:
        raise e.ValueError("`corpus` should hold at least one sampleable state")

    states = rng.integers(0, corpus.n_states, size=n)
    symmetries = rng.integers(0, 8, size=n)

    return [(*corpus.locate(int(s)), int(k)) for s, k in zip(states, symmetries)]


def sample_batch(corpus: Corpus, n: int, rng: np.random.Generator) -> List[Sample]:
    """Draws ``n`` samples, each with an independent random symmetry.

    Args:
        corpus: Corpus.
        n: Number of samples.
        rng: Random generator.

    Returns:
        The samples.

    """

    return [
        make_sample(corpus.games[game], ply, s) for game, ply, s in sample_positions(corpus, n, rng)
    ]
