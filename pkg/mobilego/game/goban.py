"""Go rules engine: positions, legality, captures, superko and scoring.

Rules are Tromp-Taylor: suicide is forbidden, positional superko is enforced
and games are scored by area. Points are flattened row-major with row 0 at
the top of the board, and a pass is encoded as the flat index ``size * size``.
"""

from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

import mobilego.utils.constants as c
import mobilego.utils.exception as e
from mobilego.utils import logging

logger = logging.get_logger(__name__)


class Color(IntEnum):
    """Content of a point, also used for the side to move."""

    EMPTY = 0
    BLACK = 1
    WHITE = 2

    @property
    def opponent(self) -> "Color":
        """The other player (empty stays empty)."""

        if self == Color.EMPTY:
            return Color.EMPTY

        return Color(3 - self)


# Zobrist keys, one row per color plus the side-to-move key
_ZOBRIST_RNG = np.random.default_rng(0x5EED60)
_ZOBRIST = [
    [0] * (c.MAX_SIZE * c.MAX_SIZE),
    _ZOBRIST_RNG.integers(0, 2**64, size=c.MAX_SIZE**2, dtype=np.uint64).tolist(),
    _ZOBRIST_RNG.integers(0, 2**64, size=c.MAX_SIZE**2, dtype=np.uint64).tolist(),
]
_WHITE_TO_MOVE = int(_ZOBRIST_RNG.integers(0, 2**64, dtype=np.uint64))


@lru_cache(maxsize=None)
def neighbors(size: int) -> Tuple[Tuple[int, ...], ...]:
    """Orthogonal neighbours of every flat index of a board.

    Args:
        size: Board side length.

    Returns:
        A tuple indexed by flat point holding the neighbouring flat points.

    """

    table = []
    for row in range(size):
        for col in range(size):
            adjacent = []
            if row > 0:
                adjacent.append((row - 1) * size + col)
            if row < size - 1:
                adjacent.append((row + 1) * size + col)
            if col > 0:
                adjacent.append(row * size + col - 1)
            if col < size - 1:
                adjacent.append(row * size + col + 1)
            table.append(tuple(adjacent))

    return tuple(table)


@dataclass(frozen=True)
class Move:
    """A point move or a pass (``point`` is None)."""

    point: Optional[Tuple[int, int]] = None

    @classmethod
    def play(cls, row: int, col: int) -> "Move":
        return cls((row, col))

    @classmethod
    def pass_move(cls) -> "Move":
        return cls(None)

    @classmethod
    def from_index(cls, index: int, size: int) -> "Move":
        """Builds a move from its flat index, ``size * size`` being a pass."""

        if not 0 <= index <= size * size:
            raise e.ValueError(f"`index` should be in [0, {size * size}]")

        if index == size * size:
            return cls.pass_move()

        return cls.play(index // size, index % size)

    @property
    def is_pass(self) -> bool:
        return self.point is None

    def index(self, size: int) -> int:
        """Flat index of the move on a board of side ``size``."""

        if self.point is None:
            return size * size

        row, col = self.point
        if not (0 <= row < size and 0 <= col < size):
            raise e.ValueError(f"`point` {self.point} is off a {size}x{size} board")

        return row * size + col

    def __str__(self) -> str:
        return "pass" if self.point is None else f"({self.point[0]}, {self.point[1]})"


@dataclass(frozen=True)
class String:
    """A maximal connected group of same-colored stones."""

    color: Color
    stones: Tuple[int, ...]
    liberties: frozenset


@dataclass(frozen=True, eq=False)
class Position:
    """An immutable Go position.

    ``stones`` is a read-only flat int8 array, ``move_history`` the ordered
    occupancy snapshots of all previous positions (oldest first) and
    ``ko_history`` the hashes of every position of the game, current included.

    """

    size: int
    stones: np.ndarray
    to_move: Color
    ko_history: frozenset
    move_history: Tuple[np.ndarray, ...]
    consecutive_passes: int
    zhash: int

    @property
    def is_over(self) -> bool:
        return self.consecutive_passes >= 2

    def at(self, row: int, col: int) -> Color:
        return Color(int(self.stones[row * self.size + col]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Position):
            return NotImplemented

        return (
            self.size == other.size
            and self.to_move == other.to_move
            and self.zhash == other.zhash
            and self.consecutive_passes == other.consecutive_passes
            and self.ko_history == other.ko_history
            and np.array_equal(self.stones, other.stones)
        )

    def __hash__(self) -> int:
        return self.zhash


@dataclass(frozen=True)
class GameRecord:
    """A finished game: ``result`` is 0 when Black won and 1 when White won."""

    size: int
    result: int
    moves: Tuple[Move, ...]
    komi: float = c.KOMI

    def __post_init__(self) -> None:
        if self.result not in (0, 1):
            raise e.ValueError("`result` should be 0 (Black won) or 1 (White won)")

        object.__setattr__(self, "moves", tuple(self.moves))

    def position_at(self, ply: int) -> Position:
        """Replays the record up to (excluding) ``ply``."""

        if not 0 <= ply <= len(self.moves):
            raise e.ValueError(f"`ply` should be in [0, {len(self.moves)}]")

        return replay(self.moves[:ply], self.size)


def _frozen(board: Sequence[int]) -> np.ndarray:
    array = np.asarray(board, dtype=np.int8)
    array.setflags(write=False)

    return array


def _group(board: List[int], table, start: int) -> Tuple[List[int], Set[int]]:
    """Flood-fills the string holding ``start`` and gathers its liberties."""

    color = board[start]
    stones = [start]
    seen = {start}
    liberties = set()

    i = 0
    while i < len(stones):
        for n in table[stones[i]]:
            v = board[n]
            if v == color:
                if n not in seen:
                    seen.add(n)
                    stones.append(n)
            elif v == Color.EMPTY:
                liberties.add(n)
        i += 1

    return stones, liberties


def new_position(size: int = c.DEFAULT_SIZE) -> Position:
    """Creates an empty board with Black to move.

    Args:
        size: Board side length, between 5 and 19.

    Returns:
        The empty position.

    """

    if not isinstance(size, int) or not c.MIN_SIZE <= size <= c.MAX_SIZE:
        raise e.ValueError(f"`size` should be an integer in [{c.MIN_SIZE}, {c.MAX_SIZE}]")

    return Position(
        size=size,
        stones=_frozen([Color.EMPTY] * (size * size)),
        to_move=Color.BLACK,
        ko_history=frozenset((0,)),
        move_history=(),
        consecutive_passes=0,
        zhash=0,
    )


def position_hash(p: Position) -> int:
    """Zobrist hash of the stones XOR the side-to-move key (64 bits)."""

    return p.zhash


def compute_hash(stones: Iterable[int], to_move: Color) -> int:
    """Computes a Zobrist hash from scratch.

    Args:
        stones: Flat point colors.
        to_move: Side to move.

    Returns:
        The 64-bit hash, equal to the one maintained incrementally by `play`.

    """

    h = _WHITE_TO_MOVE if to_move == Color.WHITE else 0
    for i, v in enumerate(stones):
        if v:
            h ^= _ZOBRIST[v][i]

    return h


def _resolve(p: Position, index: int) -> Tuple[Optional[List[int]], int, Optional[str]]:
    """Places a stone of the side to move without raising.

    Returns:
        The new board, its hash and the violated rule (None when legal).

    """

    board = p.stones.tolist()
    if board[index] != Color.EMPTY:
        return None, 0, "occupied"

    color = p.to_move
    other = color.opponent
    table = neighbors(p.size)

    board[index] = color
    h = p.zhash ^ _ZOBRIST[color][index] ^ _WHITE_TO_MOVE

    for n in table[index]:
        if board[n] == other:
            stones, liberties = _group(board, table, n)
            if not liberties:
                for s in stones:
                    board[s] = Color.EMPTY
                    h ^= _ZOBRIST[other][s]

    _, liberties = _group(board, table, index)
    if not liberties:
        return None, 0, "suicide"

    if h in p.ko_history:
        return None, 0, "superko"

    return board, h, None


def _advance(p: Position, board: np.ndarray, h: int, passes: int) -> Position:
    return Position(
        size=p.size,
        stones=board,
        to_move=p.to_move.opponent,
        ko_history=p.ko_history | {h},
        move_history=p.move_history + (p.stones,),
        consecutive_passes=passes,
        zhash=h,
    )


def is_legal(p: Position, m: Move) -> bool:
    """Checks whether ``m`` may be played by the side to move."""

    if p.is_over:
        return False

    if m.is_pass:
        return True

    try:
        index = m.index(p.size)
    except e.ValueError:
        return False

    return _resolve(p, index)[2] is None


def play(p: Position, m: Move) -> Position:
    """Plays a move and returns the resulting position.

    Args:
        p: Current position (left untouched).
        m: Move of the side to move.

    Returns:
        The next position, with captures resolved and histories extended.

    """

    if p.is_over:
        raise e.RuleError("game over", "two consecutive passes ended the game")

    if m.is_pass:
        return _advance(p, p.stones, p.zhash ^ _WHITE_TO_MOVE, p.consecutive_passes + 1)

    index = m.index(p.size)
    board, h, rule = _resolve(p, index)
    if rule:
        raise e.RuleError(rule, f"{p.to_move.name.lower()} can not play at {m}")

    return _advance(p, _frozen(board), h, 0)


def legal_moves(p: Position) -> List[Move]:
    """Every legal point move by flat index, followed by a pass."""

    if p.is_over:
        return []

    moves = []
    size = p.size
    for index in np.flatnonzero(p.stones == Color.EMPTY).tolist():
        if _resolve(p, index)[2] is None:
            moves.append(Move.play(index // size, index % size))
    moves.append(Move.pass_move())

    return moves


def replay(moves: Iterable[Move], size: int = c.DEFAULT_SIZE) -> Position:
    """Plays a sequence of moves from the empty board."""

    p = new_position(size)
    for m in moves:
        p = play(p, m)

    return p


def find_strings(p: Position) -> Tuple[np.ndarray, List[String]]:
    """Finds every string of the position.

    Returns:
        A flat array of string ids (-1 on empty points) and the strings.

    """

    board = p.stones.tolist()
    table = neighbors(p.size)
    labels = np.full(p.size * p.size, -1, dtype=np.int32)
    strings = []

    for index, v in enumerate(board):
        if v == Color.EMPTY or labels[index] >= 0:
            continue

        stones, liberties = _group(board, table, index)
        labels[stones] = len(strings)
        strings.append(String(Color(v), tuple(sorted(stones)), frozenset(liberties)))

    return labels, strings


def tromp_taylor_score(p: Position, komi: float = c.KOMI) -> float:
    """Area score, positive when White is ahead.

    Args:
        p: Position to score.
        komi: Points given to White.

    Returns:
        White area minus Black area plus komi.

    """

    board = p.stones.tolist()
    table = neighbors(p.size)
    area = {Color.BLACK: 0, Color.WHITE: 0}
    seen = set()

    for index, v in enumerate(board):
        if v != Color.EMPTY:
            area[v] += 1
            continue

        if index in seen:
            continue

        region = [index]
        seen.add(index)
        borders = set()
        i = 0
        while i < len(region):
            for n in table[region[i]]:
                if board[n] == Color.EMPTY:
                    if n not in seen:
                        seen.add(n)
                        region.append(n)
                else:
                    borders.add(board[n])
            i += 1

        if len(borders) == 1:
            area[borders.pop()] += len(region)

    return area[Color.WHITE] - area[Color.BLACK] + komi


def render(p: Position) -> str:
    """Renders the position as text, row 0 on top."""

    symbols = {Color.EMPTY: ".", Color.BLACK: "X", Color.WHITE: "O"}
    rows = []
    for row in range(p.size):
        rows.append(" ".join(symbols[p.at(row, col)] for col in range(p.size)))

    return "\n".join(rows)
