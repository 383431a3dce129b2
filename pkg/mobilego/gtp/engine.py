"""Go Text Protocol (version 2) engine.
"""

import sys
from typing import Callable, Dict, List, Optional, TextIO

import numpy as np

import mobilego
import mobilego.utils.constants as c
import mobilego.utils.exception as e
from mobilego.arena.tournament import choose_move
from mobilego.game.goban import (
    Color,
    Move,
    Position,
    compute_hash,
    new_position,
    play,
    render,
)
from mobilego.search.evaluator import Evaluator, NetEvaluator
from mobilego.search.puct import Budget
from mobilego.utils import logging

logger = logging.get_logger(__name__)

# Column letters, skipping I
LETTERS = "ABCDEFGHJKLMNOPQRST"

COLORS = {"b": Color.BLACK, "black": Color.BLACK, "w": Color.WHITE, "white": Color.WHITE}


def parse_vertex(text: str, size: int) -> Move:
    """Parses a GTP vertex (``D4``, ``pass``); row 1 is the bottom edge."""

    text = text.strip().upper()
    if text == "PASS":
        return Move.pass_move()

    if len(text) < 2 or text[0] not in LETTERS[:size] or not text[1:].isdigit():
        raise e.ValueError(f"invalid vertex `{text}`")

    number = int(text[1:])
    if not 1 <= number <= size:
        raise e.ValueError(f"invalid vertex `{text}`")

    return Move.play(size - number, LETTERS.index(text[0]))


def format_vertex(m: Move, size: int) -> str:
    """Formats a move as a GTP vertex."""

    if m.is_pass:
        return "pass"

    row, col = m.point

    return f"{LETTERS[col]}{size - row}"


def _with_side(p: Position, color: Color) -> Position:
    """The same position with ``color`` to move.

    The ko history is kept as is: the flipped position never occurred.

    """

    if p.to_move == color:
        return p

    zhash = compute_hash(p.stones.tolist(), color)

    return Position(
        size=p.size,
        stones=p.stones,
        to_move=color,
        ko_history=p.ko_history,
        move_history=p.move_history,
        consecutive_passes=p.consecutive_passes,
        zhash=zhash,
    )


def _pass_after_end(p: Position) -> Position:
    """Records a pass of the side to move on a finished game."""

    to_move = p.to_move.opponent
    zhash = compute_hash(p.stones.tolist(), to_move)

    return Position(
        size=p.size,
        stones=p.stones,
        to_move=to_move,
        ko_history=p.ko_history | {zhash},
        move_history=p.move_history + (p.stones,),
        consecutive_passes=p.consecutive_passes + 1,
        zhash=zhash,
    )


class EngineSession:
    """State of a GTP session: position, evaluator, budget and komi.

    The session only changes through protocol commands and ``genmove``
    plays the move it answers.

    """

    def __init__(
        self,
        evaluator: Evaluator,
        size: int = c.DEFAULT_SIZE,
        komi: float = c.KOMI,
        budget: Optional[Budget] = Budget(milliseconds=c.MOVETIME),
        randomize: bool = False,
        seed: int = 0,
    ) -> None:
        """Initialization method.

        Args:
            evaluator: Position evaluator.
            size: Board side length.
            komi: Komi.
            budget: Search budget per genmove, None for policy-only play.
            randomize: Whether genmove may play the second best move.
            seed: Seed of the move randomization.

        """

        logger.info("Creating class: EngineSession.")

        self.evaluator = evaluator
        self.position = new_position(size)
        self.komi = komi
        self.budget = budget
        self.randomize = randomize
        self.rng = np.random.default_rng(seed)
        self.running = True

        self.commands: Dict[str, Callable[[List[str]], str]] = {
            "protocol_version": lambda args: "2",
            "name": lambda args: "mobilego",
            "version": lambda args: mobilego.__version__,
            "known_command": self._known_command,
            "list_commands": lambda args: "\n".join(self.commands),
            "boardsize": self._boardsize,
            "clear_board": self._clear_board,
            "komi": self._komi,
            "play": self._play,
            "genmove": self._genmove,
            "showboard": lambda args: "\n" + render(self.position),
            "quit": self._quit,
        }

        logger.info("Class created.")
        logger.debug("Size: %d | Komi: %s | Budget: %s.", size, komi, budget)

    @property
    def size(self) -> int:
        return self.position.size

    def _known_command(self, args: List[str]) -> str:
        return "true" if args and args[0] in self.commands else "false"

    def _boardsize(self, args: List[str]) -> str:
        try:
            size = int(args[0])
        except (IndexError, ValueError):
            raise e.ArgumentError("boardsize not an integer")

        fixed = isinstance(self.evaluator, NetEvaluator) and size != self.evaluator.net.spec.board
        if fixed or not c.MIN_SIZE <= size <= c.MAX_SIZE:
            raise e.ArgumentError("unacceptable size")

        self.position = new_position(size)

        return ""

    def _clear_board(self, args: List[str]) -> str:
        self.position = new_position(self.size)

        return ""

    def _komi(self, args: List[str]) -> str:
        try:
            self.komi = float(args[0])
        except (IndexError, ValueError):
            raise e.ArgumentError("komi not a float")

        return ""

    def _color(self, args: List[str]) -> Color:
        if not args or args[0].lower() not in COLORS:
            raise e.ArgumentError("invalid color")

        return COLORS[args[0].lower()]

    def _play(self, args: List[str]) -> str:
        color = self._color(args)
        if len(args) < 2:
            raise e.ArgumentError("invalid vertex")

        try:
            move = parse_vertex(args[1], self.size)
            self.position = play(_with_side(self.position, color), move)
        except (e.ValueError, e.RuleError):
            raise e.ArgumentError("illegal move")

        return ""

    def _genmove(self, args: List[str]) -> str:
        color = self._color(args)
        if self.position.is_over:
            self.position = _pass_after_end(_with_side(self.position, color))

            return "pass"

        p = _with_side(self.position, color)
        move = choose_move(self.evaluator, p, self.budget, self.rng, self.randomize, self.komi)
        self.position = play(p, move)

        return format_vertex(move, self.size)

    def _quit(self, args: List[str]) -> str:
        self.running = False

        return ""

    def handle(self, line: str) -> str:
        """Answers one command line.

        Args:
            line: Command, optionally preceded by a numeric id.

        Returns:
            ``= response`` or ``? error``, terminated by a blank line; an
            empty string for blank or comment lines.

        """

        line = line.split("#", 1)[0].strip()
        if not line:
            return ""

        tokens = line.split()
        ident = ""
        if tokens[0].isdigit():
            ident = tokens.pop(0)
        if not tokens:
            return ""

        command, args = tokens[0].lower(), tokens[1:]

        if command not in self.commands:
            return f"?{ident} unknown command\n\n"

        try:
            response = self.commands[command](args)
        except e.ArgumentError as error:
            return f"?{ident} {error}\n\n"
        except Exception as error:
            logger.warning("Command `%s` failed: %s.", line, error)
            return f"?{ident} {error}\n\n"

        return f"={ident} {response}\n\n"

    def serve(self, stdin: TextIO = sys.stdin, stdout: TextIO = sys.stdout) -> None:
        """Serves commands until ``quit`` or the end of the input.

        Log records go to stderr while serving.

        """

        logging.redirect_console(sys.stderr)

        for line in stdin:
            response = self.handle(line)
            if response:
                stdout.write(response)
                stdout.flush()
            if not self.running:
                break

