import numpy as np
import pytest

from mobilego.game import encoder, goban, tactics
from mobilego.utils import exception


def _random_position(size, n, seed):
    rng = np.random.default_rng(seed)
    p = goban.new_position(size)

    for _ in range(n):
        moves = [m for m in goban.legal_moves(p) if not m.is_pass]
        if not moves:
            break
        p = goban.play(p, moves[rng.integers(len(moves))])

    return p


def test_edge_ladder_is_captured():
    # A lone corner stone with two liberties is chased along the edge
    p = goban.replay([goban.Move.play(2, 2), goban.Move.play(0, 0)], 5)
    status = tactics.ladder_status(p)

    assert status.in_ladder[0]
    assert not status.in_ladder[12]
    assert not status.adjacent_to_ladder.any()


def test_string_in_atari():
    p = goban.replay([goban.Move.play(0, 1), goban.Move.play(0, 0)], 5)
    status = tactics.ladder_status(p)

    assert status.in_ladder[0]
    assert status.adjacent_to_ladder[1]


def test_free_strings():
    p = goban.replay([goban.Move.play(2, 2), goban.Move.play(6, 6)], 9)
    status = tactics.ladder_status(p)

    assert not status.in_ladder.any()
    assert not status.adjacent_to_ladder.any()


def test_depth_exhaustion_is_not_a_ladder():
    p = goban.replay([goban.Move.play(2, 2), goban.Move.play(0, 0)], 5)

    assert not tactics.ladder_status(p, depth=2).in_ladder[0]


def test_brute_force_capture():
    p = goban.replay([goban.Move.play(0, 1), goban.Move.play(0, 0)], 5)

    assert tactics.brute_force_capture(p, (0, 0), depth=3) == tactics.Capture.CAPTURED

    p = goban.replay([goban.Move.play(2, 2)], 5)

    assert tactics.brute_force_capture(p, (2, 2), depth=3) == tactics.Capture.ESCAPES

    with pytest.raises(exception.ValueError):
        tactics.brute_force_capture(p, (0, 0))

    with pytest.raises(exception.ValueError):
        tactics.brute_force_capture(p, (2, 2), depth=61)


def test_ladder_status_agrees_with_brute_force():
    checked = 0

    for seed in range(5):
        p = _random_position(7, 30, seed)
        status = tactics.ladder_status(p)
        _, strings = goban.find_strings(p)

        for s in strings:
            if len(s.liberties) > 2:
                assert not status.in_ladder[s.stones[0]]
                continue

            target = divmod(s.stones[0], 7)
            verdict = tactics.brute_force_capture(p, target, depth=3)
            if verdict == tactics.Capture.UNKNOWN:
                continue

            assert status.in_ladder[s.stones[0]] == (verdict == tactics.Capture.CAPTURED)
            checked += 1

    assert checked > 0


def _quiet_position(size, n, seed):
    # Random stones without any capture, so no ko is ever open
    rng = np.random.default_rng(seed)
    p = goban.new_position(size)

    for _ in range(n):
        moves = [m for m in goban.legal_moves(p) if not m.is_pass]
        rng.shuffle(moves)
        for m in moves:
            after = goban.play(p, m)
            if np.count_nonzero(after.stones) == np.count_nonzero(p.stones) + 1:
                p = after
                break

    return p


# Black chases the white stone on (4, 4) towards the lower left corner; the
# white stone on (2, 5) spoils the chase towards the upper right
LADDER = [
    goban.Move.play(3, 4),
    goban.Move.play(4, 4),
    goban.Move.play(4, 3),
    goban.Move.play(2, 5),
    goban.Move.play(5, 5),
]


def test_diagonal_ladder():
    p = goban.replay(LADDER, 9)
    status = tactics.ladder_status(p)

    assert status.in_ladder[40]
    assert not status.in_ladder[23]
    assert tactics.brute_force_capture(p, (4, 4), depth=20) == tactics.Capture.CAPTURED


def test_diagonal_ladder_with_breaker():
    p = goban.replay(LADDER + [goban.Move.play(7, 1)], 9)
    status = tactics.ladder_status(p)

    assert not status.in_ladder[40]
    assert tactics.brute_force_capture(p, (4, 4), depth=20) == tactics.Capture.ESCAPES


def test_ladder_status_agrees_with_deep_brute_force():
    checked = 0

    for seed in range(2):
        p = _quiet_position(9, 36, seed)
        status = tactics.ladder_status(p)
        _, strings = goban.find_strings(p)

        for s in strings:
            if len(s.liberties) > 2:
                continue

            verdict = tactics.brute_force_capture(p, divmod(s.stones[0], 9), depth=12)
            if verdict == tactics.Capture.UNKNOWN:
                continue

            assert status.in_ladder[s.stones[0]] == (verdict == tactics.Capture.CAPTURED)
            checked += 1

    assert checked > 0


@pytest.mark.parametrize("symmetry", range(8))
def test_ladder_status_is_equivariant(symmetry):
    for p in (goban.replay(LADDER, 9), _quiet_position(9, 30, 3)):
        status = tactics.ladder_status(p)
        moved = tactics.ladder_status(encoder.transform_position(p, symmetry))
        perm = encoder.permutation(symmetry, 9)

        assert np.array_equal(moved.in_ladder[perm], status.in_ladder)
        assert np.array_equal(moved.adjacent_to_ladder[perm], status.adjacent_to_ladder)
