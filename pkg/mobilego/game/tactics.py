"""Ladder reading, feeding the two ladder planes of the encoder.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Set, Tuple

import numpy as np

import mobilego.utils.constants as c
import mobilego.utils.exception as e
from mobilego.game.goban import (
    Color,
    Move,
    Position,
    _group,
    find_strings,
    is_legal,
    legal_moves,
    neighbors,
    play,
)
from mobilego.utils import logging

logger = logging.get_logger(__name__)


@dataclass(frozen=True)
class LadderStatus:
    """Flat per-point masks.

    ``in_ladder`` marks the stones of strings the opponent can capture in a
    ladder, ``adjacent_to_ladder`` the stones of strings touching one of them.

    """

    in_ladder: np.ndarray
    adjacent_to_ladder: np.ndarray


class Capture(Enum):
    """Verdict of the exhaustive capture search."""

    CAPTURED = "captured"
    ESCAPES = "escapes"
    UNKNOWN = "unknown"


def _place(board: List[int], table, index: int, color: int) -> Optional[List[int]]:
    """Plays a stone on a scratch board, returning None when it is suicide."""

    if board[index] != Color.EMPTY:
        return None

    board = board[:]
    board[index] = color
    other = 3 - color

    for n in table[index]:
        if board[n] == other:
            stones, liberties = _group(board, table, n)
            if not liberties:
                for s in stones:
                    board[s] = Color.EMPTY

    if not _group(board, table, index)[1]:
        return None

    return board


def _attack(board: List[int], table, target: int, depth: int) -> Optional[bool]:
    """Attacker to move; True when the target is captured, None when unknown."""

    color = board[target]
    _, liberties = _group(board, table, target)

    if len(liberties) >= 3:
        return False
    if depth <= 0:
        return None
    if len(liberties) == 1:
        return True

    unknown = False
    for lib in sorted(liberties):
        after = _place(board, table, lib, 3 - color)
        if after is None or after[target] != color:
            continue
        if len(_group(after, table, target)[1]) != 1:
            continue

        escaped = _escape(after, table, target, depth - 1)
        if escaped is False:
            return True
        unknown = unknown or escaped is None

    return None if unknown else False


def _escape(board: List[int], table, target: int, depth: int) -> Optional[bool]:
    """Defender to move with the target in atari; True when it gets away."""

    if depth <= 0:
        return None

    color = board[target]
    stones, liberties = _group(board, table, target)

    # Extensions from the last liberty, then captures of adjacent strings in atari
    candidates = set(liberties)
    for s in stones:
        for n in table[s]:
            if board[n] == 3 - color:
                _, enemy_liberties = _group(board, table, n)
                if len(enemy_liberties) == 1:
                    candidates |= enemy_liberties

    unknown = False
    for move in sorted(candidates):
        after = _place(board, table, move, color)
        if after is None:
            continue

        captured = _attack(after, table, target, depth - 1)
        if captured is False:
            return True
        unknown = unknown or captured is None

    return None if unknown else False


def _capturable(board: List[int], table, target: int, depth: int) -> bool:
    return _attack(board, table, target, depth) is True


def ladder_status(p: Position, depth: int = c.LADDER_DEPTH) -> LadderStatus:
    """Reads ladders for every string of both colors.

    A string is in ladder when it has one or two liberties and its opponent,
    moving first, captures it by repeated ataris. The defender may extend from
    its last liberty or capture an adjacent attacker string in atari. Searches
    that hit the depth cap count as not in ladder.

    Args:
        p: Position to read.
        depth: Maximum number of plies.

    Returns:
        The ladder masks.

    """

    labels, strings = find_strings(p)
    board = p.stones.tolist()
    table = neighbors(p.size)

    captured = [
        len(s.liberties) <= 2 and _capturable(board, table, s.stones[0], depth)
        for s in strings
    ]

    in_ladder = np.zeros(p.size * p.size, dtype=bool)
    adjacent = np.zeros(p.size * p.size, dtype=bool)

    for i, s in enumerate(strings):
        if captured[i]:
            in_ladder[list(s.stones)] = True

    for i, s in enumerate(strings):
        touching = {
            int(labels[n]) for st in s.stones for n in table[st] if labels[n] >= 0
        }
        touching.discard(i)
        if any(captured[t] for t in touching):
            adjacent[list(s.stones)] = True

    return LadderStatus(in_ladder, adjacent)


def _liberties(p: Position, target: int) -> Set[int]:
    return _group(p.stones.tolist(), neighbors(p.size), target)[1]


def _defend(p: Position, target: int, color: Color, depth: int) -> Capture:
    if p.stones[target] != color:
        return Capture.CAPTURED

    count = len(_liberties(p, target))
    if count >= 3:
        return Capture.ESCAPES
    if depth <= 0:
        return Capture.UNKNOWN

    verdicts = set()
    for m in legal_moves(p):
        after = play(p, m)
        if after.stones[target] != color:
            continue
        verdict = _chase(after, target, color, depth - 1)
        if verdict == Capture.ESCAPES:
            return Capture.ESCAPES
        verdicts.add(verdict)

    return Capture.UNKNOWN if Capture.UNKNOWN in verdicts else Capture.CAPTURED


def _chase(p: Position, target: int, color: Color, depth: int) -> Capture:
    liberties = _liberties(p, target)
    if len(liberties) >= 3:
        return Capture.ESCAPES
    if depth <= 0:
        return Capture.UNKNOWN

    if len(liberties) == 1:
        last = Move.from_index(next(iter(liberties)), p.size)
        if is_legal(p, last):
            return Capture.CAPTURED

    verdicts = set()
    for m in legal_moves(p):
        if m.is_pass:
            continue

        after = play(p, m)
        if after.stones[target] != color:
            return Capture.CAPTURED
        if len(_liberties(after, target)) > 1:
            continue

        verdict = _defend(after, target, color, depth - 1)
        if verdict == Capture.CAPTURED:
            return Capture.CAPTURED
        verdicts.add(verdict)

    return Capture.UNKNOWN if Capture.UNKNOWN in verdicts else Capture.ESCAPES


def brute_force_capture(
    p: Position, target: Tuple[int, int], depth: int = c.LADDER_DEPTH
) -> Capture:
    """Exhaustive capture search used to check ``ladder_status``.

    The attacker (the opponent of the target's owner) moves first and may
    play any legal move that captures the target or leaves it in atari; the
    defender may play any legal move. The target escapes once it reaches
    three liberties or when the attacker runs out of forcing moves.

    Args:
        p: Position to analyse (the side to move is ignored).
        target: Any stone (row, col) of the target string.
        depth: Maximum number of plies, at most 60.

    Returns:
        The verdict, `Capture.UNKNOWN` when the depth ran out.

    """

    if depth > c.LADDER_DEPTH:
        raise e.ValueError(f"`depth` should be <= {c.LADDER_DEPTH}")

    index = Move.play(*target).index(p.size)
    color = Color(int(p.stones[index]))
    if color == Color.EMPTY:
        raise e.ValueError(f"`target` {target} is not a stone")

    if p.is_over:
        p = _restart(p)
    if p.to_move == color:
        p = _restart(play(p, Move.pass_move()))

    return _chase(p, index, color, depth)


def _restart(p: Position) -> Position:
    """Clears the pass counter of a position reached by passing twice."""

    return Position(
        size=p.size,
        stones=p.stones,
        to_move=p.to_move,
        ko_history=p.ko_history,
        move_history=p.move_history,
        consecutive_passes=0,
        zhash=p.zhash,
    )
