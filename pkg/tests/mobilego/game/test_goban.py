import numpy as np
import pytest

from mobilego.game import goban
from mobilego.utils import exception


def _random_moves(size, n, seed):
    rng = np.random.default_rng(seed)
    p = goban.new_position(size)
    positions = [p]

    for _ in range(n):
        moves = [m for m in goban.legal_moves(p) if not m.is_pass]
        if not moves:
            break
        p = goban.play(p, moves[rng.integers(len(moves))])
        positions.append(p)

    return positions


def _area_score(stones, size, komi):
    board = np.asarray(stones).reshape(size, size)
    empty = board == goban.Color.EMPTY

    def reach(color):
        mask = board == color
        while True:
            grown = mask.copy()
            grown[1:, :] |= mask[:-1, :]
            grown[:-1, :] |= mask[1:, :]
            grown[:, 1:] |= mask[:, :-1]
            grown[:, :-1] |= mask[:, 1:]
            grown &= empty | (board == color)
            if (grown == mask).all():
                return mask
            mask = grown

    black, white = reach(goban.Color.BLACK), reach(goban.Color.WHITE)
    black_area = (board == goban.Color.BLACK).sum() + (empty & black & ~white).sum()
    white_area = (board == goban.Color.WHITE).sum() + (empty & white & ~black).sum()

    return white_area - black_area + komi


def test_color_opponent():
    assert goban.Color.BLACK.opponent == goban.Color.WHITE
    assert goban.Color.WHITE.opponent == goban.Color.BLACK
    assert goban.Color.EMPTY.opponent == goban.Color.EMPTY


def test_move():
    m = goban.Move.play(3, 15)

    assert m.index(19) == 3 * 19 + 15
    assert goban.Move.from_index(m.index(19), 19) == m
    assert goban.Move.from_index(361, 19).is_pass
    assert goban.Move.pass_move().index(9) == 81

    with pytest.raises(exception.ValueError):
        goban.Move.from_index(362, 19)

    with pytest.raises(exception.ValueError):
        goban.Move.play(9, 0).index(9)


def test_new_position():
    p = goban.new_position(9)

    assert p.size == 9
    assert p.to_move == goban.Color.BLACK
    assert p.zhash == 0
    assert not p.stones.any()
    assert not p.is_over

    with pytest.raises(exception.ValueError):
        goban.new_position(4)

    with pytest.raises(exception.ValueError):
        goban.new_position(20)


def test_play_is_pure():
    p = goban.new_position(9)
    q = goban.play(p, goban.Move.play(2, 2))

    assert p.at(2, 2) == goban.Color.EMPTY
    assert q.at(2, 2) == goban.Color.BLACK
    assert q.to_move == goban.Color.WHITE
    assert len(q.move_history) == 1

    with pytest.raises(ValueError):
        q.stones[0] = 1


def test_capture():
    p = goban.replay(
        [
            goban.Move.play(0, 0),
            goban.Move.play(0, 1),
            goban.Move.play(4, 4),
            goban.Move.play(1, 0),
        ],
        5,
    )

    assert p.at(0, 0) == goban.Color.EMPTY
    assert p.at(0, 1) == goban.Color.WHITE
    assert p.at(1, 0) == goban.Color.WHITE


def test_suicide():
    p = goban.replay(
        [
            goban.Move.play(4, 4),
            goban.Move.play(0, 1),
            goban.Move.play(4, 3),
            goban.Move.play(1, 0),
        ],
        5,
    )

    assert not goban.is_legal(p, goban.Move.play(0, 0))

    with pytest.raises(exception.RuleError) as error:
        goban.play(p, goban.Move.play(0, 0))

    assert error.value.rule == "suicide"


def test_occupied():
    p = goban.play(goban.new_position(5), goban.Move.play(2, 2))

    with pytest.raises(exception.RuleError) as error:
        goban.play(p, goban.Move.play(2, 2))

    assert error.value.rule == "occupied"


def test_superko():
    p = goban.replay(
        [
            goban.Move.play(0, 1),
            goban.Move.play(0, 2),
            goban.Move.play(1, 0),
            goban.Move.play(2, 2),
            goban.Move.play(2, 1),
            goban.Move.play(1, 3),
            goban.Move.play(4, 4),
            goban.Move.play(1, 1),
            goban.Move.play(1, 2),
        ],
        5,
    )

    assert p.at(1, 1) == goban.Color.EMPTY
    assert not goban.is_legal(p, goban.Move.play(1, 1))
    assert goban.Move.play(1, 1) not in goban.legal_moves(p)

    with pytest.raises(exception.RuleError) as error:
        goban.play(p, goban.Move.play(1, 1))

    assert error.value.rule == "superko"

    # Passes are never a superko violation
    assert goban.is_legal(p, goban.Move.pass_move())


def test_passes_end_the_game():
    p = goban.new_position(5)
    p = goban.play(p, goban.Move.pass_move())

    assert p.consecutive_passes == 1
    assert p.to_move == goban.Color.WHITE
    assert not p.is_over

    p = goban.play(p, goban.Move.pass_move())

    assert p.is_over
    assert goban.legal_moves(p) == []
    assert not goban.is_legal(p, goban.Move.pass_move())

    with pytest.raises(exception.RuleError) as error:
        goban.play(p, goban.Move.play(0, 0))

    assert error.value.rule == "game over"


def test_legal_moves():
    moves = goban.legal_moves(goban.new_position(5))

    assert len(moves) == 26
    assert moves[-1].is_pass
    assert [m.index(5) for m in moves[:-1]] == list(range(25))


def test_random_games_keep_invariants():
    for seed in range(5):
        positions = _random_moves(9, 60, seed)

        for previous, p in zip(positions, positions[1:]):
            _, strings = goban.find_strings(p)

            assert all(s.liberties for s in strings)
            assert p.zhash == goban.compute_hash(p.stones.tolist(), p.to_move)
            assert p.zhash not in previous.ko_history
            assert goban.position_hash(p) == p.zhash


def test_find_strings():
    p = goban.replay([goban.Move.play(0, 0), goban.Move.play(4, 4), goban.Move.play(0, 1)], 5)
    labels, strings = goban.find_strings(p)

    assert len(strings) == 2
    assert labels[0] == labels[1]
    assert labels[2] == -1

    black = strings[labels[0]]

    assert black.color == goban.Color.BLACK
    assert black.stones == (0, 1)
    assert black.liberties == frozenset({2, 5, 6})


def test_tromp_taylor_score():
    assert goban.tromp_taylor_score(goban.new_position(5)) == 7.5

    p = goban.play(goban.new_position(5), goban.Move.play(2, 2))

    assert goban.tromp_taylor_score(p) == -25 + 7.5
    assert goban.tromp_taylor_score(p, komi=0.5) == -24.5

    for seed in range(5):
        p = _random_moves(7, 40, seed)[-1]

        assert goban.tromp_taylor_score(p, 7.5) == _area_score(p.stones, 7, 7.5)


def test_game_record():
    moves = (goban.Move.play(2, 2), goban.Move.play(3, 3), goban.Move.pass_move())
    rec = goban.GameRecord(size=9, result=1, moves=moves)

    assert rec.komi == 7.5
    assert rec.position_at(0) == goban.new_position(9)
    assert rec.position_at(2) == goban.replay(moves[:2], 9)

    with pytest.raises(exception.ValueError):
        rec.position_at(4)

    with pytest.raises(exception.ValueError):
        goban.GameRecord(size=9, result=2, moves=moves)


def test_render():
    p = goban.replay([goban.Move.play(0, 0), goban.Move.play(4, 4)], 5)
    rows = goban.render(p).split("\n")

    assert len(rows) == 5
    assert rows[0] == "X . . . ."
    assert rows[4] == ". . . . O"
