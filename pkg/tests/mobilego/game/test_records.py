import numpy as np
import pytest

from mobilego.game import goban, records
from mobilego.utils import exception


def _random_record(size, n, seed):
    rng = np.random.default_rng(seed)
    p = goban.new_position(size)
    moves = []

    for _ in range(n):
        legal = [m for m in goban.legal_moves(p) if not m.is_pass]
        if not legal:
            break
        m = legal[rng.integers(len(legal))]
        p = goban.play(p, m)
        moves.append(m)

    return goban.GameRecord(size=size, result=int(rng.integers(2)), moves=tuple(moves))


def _corpus(n_games, size=9, n_moves=12):
    return records.Corpus([_random_record(size, n_moves, seed) for seed in range(n_games)])


def test_parse_sgf():
    rec = records.parse_sgf("(;SZ[19]RE[W+R];B[pd];W[dp])")

    assert rec.size == 19
    assert rec.result == 1
    assert rec.komi == 7.5
    assert rec.moves == (goban.Move.play(3, 15), goban.Move.play(15, 3))


def test_parse_sgf_passes_and_komi():
    rec = records.parse_sgf(b"(;SZ[9]KM[6.5]RE[B+3.5];B[ee];W[];B[cc])")

    assert rec.result == 0
    assert rec.komi == 6.5
    assert rec.moves[1].is_pass
    assert rec.moves[2] == goban.Move.play(2, 2)


@pytest.mark.parametrize(
    "text, reason",
    [
        ("(;SZ[9];B[ee])", "no result"),
        ("(;SZ[9]RE[0];B[ee])", "no result"),
        ("(;SZ[9]HA[2]RE[B+3.5];W[ee])", "handicap"),
        ("(;SZ[9]AB[cc][gg]RE[B+3.5];W[ee])", "handicap"),
        ("(;SZ[9]RE[B+1];B[ee];B[cc])", "order"),
        ("(;SZ[9]RE[B+1];B[ee];W[ee])", "occupied"),
        ("(;SZ[4]RE[B+1];B[bb])", "size"),
        ("(;SZ[9]RE[B+1])", "empty"),
        ("not an sgf", "parse"),
    ],
)
def test_parse_sgf_rejects(text, reason):
    with pytest.raises(exception.RejectError) as error:
        records.parse_sgf(text)

    assert error.value.reason == reason


def test_ingest(tmp_path):
    (tmp_path / "a.sgf").write_text("(;SZ[9]RE[W+R];B[ee];W[cc])")
    (tmp_path / "b.sgf").write_text("(;SZ[9]RE[B+R];B[gg];W[cc];B[ee])")
    (tmp_path / "c.sgf").write_text("(;SZ[9];B[ee])")

    corpus, rejected = records.ingest(sorted(tmp_path.glob("*.sgf")))

    assert len(corpus) == 2
    assert corpus.n_states == 5
    assert rejected == {"no result": 1}


def test_corpus():
    games = [
        goban.GameRecord(9, 0, (goban.Move.play(0, 0), goban.Move.pass_move(), goban.Move.play(1, 1))),
        goban.GameRecord(9, 1, (goban.Move.play(4, 4),)),
    ]
    corpus = records.Corpus(games)

    assert corpus.size == 9
    assert corpus.n_states == 3
    assert list(corpus.cumulative_state_index) == [2, 3]
    assert corpus.locate(0) == (0, 0)
    assert corpus.locate(1) == (0, 2)
    assert corpus.locate(2) == (1, 0)

    with pytest.raises(exception.ValueError):
        corpus.locate(3)

    with pytest.raises(exception.ValueError):
        records.Corpus([goban.GameRecord(9, 0, (goban.Move.pass_move(),))])

    with pytest.raises(exception.ValueError):
        records.Corpus([games[0], goban.GameRecord(13, 0, (goban.Move.play(0, 0),))])


def test_cache_round_trip(tmp_path):
    games = [
        _random_record(9, 15, 0),
        goban.GameRecord(9, 1, (goban.Move.play(2, 2), goban.Move.pass_move()), komi=6.5),
    ]
    corpus = records.Corpus(games)
    path = tmp_path / "corpus.bin"

    records.write_cache(corpus, path)

    assert records.read_cache(path) == corpus
    assert path.read_bytes()[:4] == records.MAGIC


def test_cache_errors(tmp_path):
    rec = goban.GameRecord(9, 0, (goban.Move.play(2, 2), goban.Move.play(3, 3)))
    path = tmp_path / "corpus.bin"
    records.write_cache(records.Corpus([rec]), path)
    data = path.read_bytes()

    path.write_bytes(data[:-1])
    with pytest.raises(exception.FormatError) as error:
        records.read_cache(path)

    # 10-byte file header, 5-byte game header
    assert error.value.offset == 15

    path.write_bytes(b"XXXX" + data[4:])
    with pytest.raises(exception.FormatError) as error:
        records.read_cache(path)

    assert error.value.offset == 0

    path.write_bytes(data + b"\x00")
    with pytest.raises(exception.FormatError):
        records.read_cache(path)

    path.write_bytes(data[:6])
    with pytest.raises(exception.FormatError):
        records.read_cache(path)


@pytest.mark.parametrize("size", [0, 4, 20, 255])
def test_cache_rejects_board_size(tmp_path, size):
    path = tmp_path / "corpus.bin"
    records.write_cache(records.Corpus([goban.GameRecord(9, 0, (goban.Move.play(2, 2),))]), path)
    data = bytearray(path.read_bytes())
    data[5] = size
    path.write_bytes(bytes(data))

    with pytest.raises(exception.FormatError) as error:
        records.read_cache(path)

    assert error.value.offset == 5


def test_split():
    corpus = _corpus(10)
    s = records.split(corpus, 3, seed=1)

    assert len(s.train) == 7
    assert len(s.validation) == 3
    assert s.holdout_games == 3
    assert not set(s.train_ids) & set(s.holdout_ids)
    assert sorted(s.train_ids + s.holdout_ids) == list(range(10))

    again = records.split(corpus, 3, seed=1)

    assert again.holdout_ids == s.holdout_ids
    assert [v.policy_target for v in again.validation] == [v.policy_target for v in s.validation]

    assert records.split(corpus, 0).train == corpus

    with pytest.raises(exception.ValueError):
        records.split(corpus, 10)


def test_sample_batch():
    corpus = _corpus(4)
    samples = records.sample_batch(corpus, 16, np.random.default_rng(0))

    assert len(samples) == 16
    for sample in samples:
        assert sample.input.shape == (9, 9, 21)
        assert 0 <= sample.policy_target < 81
        assert sample.value_target in (0.0, 1.0)

    positions = records.sample_positions(corpus, 50, np.random.default_rng(1))

    assert all(0 <= s < 8 for _, _, s in positions)
    assert positions == records.sample_positions(corpus, 50, np.random.default_rng(1))
