"""21-plane state encoder and the eight board symmetries.

Plane layout (size x size x 21, values 0/1):

    0-1    current black stones, current white stones
    2-9    previous 4 positions as (black, white) pairs, most recent first
    10-13  black strings with 1, 2, 3 and >= 4 liberties
    14-17  white strings with 1, 2, 3 and >= 4 liberties
    18     stones of strings capturable in a ladder
    19     stones of strings adjacent to a string capturable in a ladder
    20     all ones when White is to move
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Tuple

import numpy as np

import mobilego.utils.constants as c
import mobilego.utils.exception as e
from mobilego.game.goban import (
    Color,
    GameRecord,
    Move,
    Position,
    compute_hash,
    find_strings,
)
from mobilego.game.tactics import ladder_status
from mobilego.utils import logging

logger = logging.get_logger(__name__)

# Board isometries as (row, col) -> (row', col') on a board of side n
SYMMETRIES = (
    lambda r, col, n: (r, col),
    lambda r, col, n: (col, n - 1 - r),
    lambda r, col, n: (n - 1 - r, n - 1 - col),
    lambda r, col, n: (n - 1 - col, r),
    lambda r, col, n: (n - 1 - r, col),
    lambda r, col, n: (r, n - 1 - col),
    lambda r, col, n: (col, r),
    lambda r, col, n: (n - 1 - col, n - 1 - r),
)

# Inverse of every symmetry id
INVERSES = (0, 3, 2, 1, 4, 5, 6, 7)

SYMMETRY_NAMES = (
    "identity",
    "rotate90",
    "rotate180",
    "rotate270",
    "flip_rows",
    "flip_cols",
    "transpose",
    "anti_transpose",
)


@dataclass(frozen=True)
class Sample:
    """A training triple: input planes, flat move index and game result."""

    input: np.ndarray
    policy_target: int
    value_target: float


def _check_symmetry(s: int) -> None:
    if s not in range(len(SYMMETRIES)):
        raise e.ValueError("`symmetry` should be an integer in [0, 7]")


@lru_cache(maxsize=None)
def permutation(s: int, size: int) -> np.ndarray:
    """Destination flat index of every flat index under symmetry ``s``."""

    _check_symmetry(s)

    perm = np.empty(size * size, dtype=np.int64)
    for i in range(size * size):
        row, col = SYMMETRIES[s](i // size, i % size, size)
        perm[i] = row * size + col
    perm.setflags(write=False)

    return perm


def transform_policy_index(i: int, s: int, size: int = c.DEFAULT_SIZE) -> int:
    """Flat index of the same physical point after symmetry ``s``.

    Args:
        i: Flat index in [0, size * size).
        s: Symmetry id.
        size: Board side length.

    Returns:
        The transformed flat index.

    """

    if not 0 <= i < size * size:
        raise e.ValueError(f"`i` should be in [0, {size * size})")

    return int(permutation(s, size)[i])


def transform_move(m: Move, s: int, size: int) -> Move:
    """Applies a symmetry to a move; passes are left untouched."""

    if m.is_pass:
        return m

    return Move.from_index(transform_policy_index(m.index(size), s, size), size)


def transform_tensor(t: np.ndarray, s: int) -> np.ndarray:
    """Moves every plane of a (size, size, planes) tensor by symmetry ``s``.

    Args:
        t: Input tensor.
        s: Symmetry id.

    Returns:
        The transformed tensor; plane indices are unchanged.

    """

    size = t.shape[0]
    if t.shape[1] != size:
        raise e.SizeError("`t` should be a square (size, size, planes) tensor")

    flat = t.reshape(size * size, -1)
    out = np.empty_like(flat)
    out[permutation(s, size)] = flat

    return out.reshape(t.shape)


def transform_position(p: Position, s: int) -> Position:
    """Applies a symmetry to a whole position, histories included."""

    perm = permutation(s, p.size)

    def moved(stones: np.ndarray) -> np.ndarray:
        out = np.empty_like(stones)
        out[perm] = stones
        out.setflags(write=False)

        return out

    history = tuple(moved(h) for h in p.move_history)

    # Snapshot k plies back had the side to move flipped k times
    hashes = set()
    to_move = p.to_move
    for snapshot in reversed(history):
        to_move = to_move.opponent
        hashes.add(compute_hash(snapshot.tolist(), to_move))

    stones = moved(p.stones)
    zhash = compute_hash(stones.tolist(), p.to_move)
    hashes.add(zhash)

    return Position(
        size=p.size,
        stones=stones,
        to_move=p.to_move,
        ko_history=frozenset(hashes),
        move_history=history,
        consecutive_passes=p.consecutive_passes,
        zhash=zhash,
    )


def encode(p: Position) -> np.ndarray:
    """Encodes a position into the 21 input planes.

    Args:
        p: Position with its history.

    Returns:
        A (size, size, 21) uint8 tensor.

    """

    n = p.size * p.size
    planes = np.zeros((n, c.N_PLANES), dtype=np.uint8)

    planes[:, 0] = p.stones == Color.BLACK
    planes[:, 1] = p.stones == Color.WHITE

    for k, snapshot in enumerate(reversed(p.move_history[-c.HISTORY :])):
        planes[:, 2 + 2 * k] = snapshot == Color.BLACK
        planes[:, 3 + 2 * k] = snapshot == Color.WHITE

    _, strings = find_strings(p)
    for s in strings:
        base = 10 if s.color == Color.BLACK else 14
        bin_ = min(len(s.liberties), 4) - 1
        planes[list(s.stones), base + bin_] = 1

    ladders = ladder_status(p)
    planes[:, 18] = ladders.in_ladder
    planes[:, 19] = ladders.adjacent_to_ladder

    if p.to_move == Color.WHITE:
        planes[:, 20] = 1

    return planes.reshape(p.size, p.size, c.N_PLANES)


def make_sample(rec: GameRecord, ply: int, s: int = 0) -> Sample:
    """Builds the training sample of one ply of a record.

    Args:
        rec: Game record.
        ply: Index of the move to predict.
        s: Symmetry id applied to the input and to the target.

    Returns:
        The sample; the value target is the game result (1.0 if White won).

    """

    if not 0 <= ply < len(rec.moves):
        raise e.ValueError(f"`ply` should be in [0, {len(rec.moves)})")

    move = rec.moves[ply]
    if move.is_pass:
        raise e.ValueError(f"ply {ply} is a pass and can not be a policy target")

    _check_symmetry(s)

    position = rec.position_at(ply)
    planes = transform_tensor(encode(position), s)
    target = transform_policy_index(move.index(rec.size), s, rec.size)

    return Sample(planes, target, float(rec.result))


def stack(samples: Iterable[Sample]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stacks samples into input, policy-target and value-target arrays."""

    samples = list(samples)
    if not samples:
        raise e.SizeError("`samples` should not be empty")

    inputs = np.stack([s.input for s in samples]).astype(np.float32)
    policy = np.asarray([s.policy_target for s in samples], dtype=np.int64)
    value = np.asarray([s.value_target for s in samples], dtype=np.float32)

    return inputs, policy, value


def describe(t: np.ndarray) -> List[str]:
    """Renders every plane of a tensor as a block of 0/1 rows."""

    blocks = []
    for k in range(t.shape[2]):
        rows = [" ".join(str(int(v)) for v in t[r, :, k]) for r in range(t.shape[0])]
        blocks.append(f"plane {k}\n" + "\n".join(rows))

    return blocks
