import numpy as np
import pandas as pd
import pytest

from mobilego import cli
from mobilego.game import goban, records
from mobilego.models import network


def _cache(path, n_games=4, size=9, n_moves=10):
    games = []
    for seed in range(n_games):
        rng = np.random.default_rng(seed)
        p = goban.new_position(size)
        moves = []
        for _ in range(n_moves):
            legal = [m for m in goban.legal_moves(p) if not m.is_pass]
            m = legal[rng.integers(len(legal))]
            p = goban.play(p, m)
            moves.append(m)
        games.append(goban.GameRecord(size, seed % 2, tuple(moves)))

    records.write_cache(records.Corpus(games), path)

    return path


def _checkpoint(tmp_path, name="net"):
    cache = _cache(tmp_path / "corpus.bin")
    checkpoint = tmp_path / f"{name}.pt"

    code = cli.run(
        [
            "train",
            "--cache", str(cache),
            "--spec", "mobile.conv.avg.1.8.16",
            "--epochs", "0",
            "--batch", "4",
            "--epoch-samples", "4",
            "--out", str(checkpoint),
        ]
    )

    assert code == 0

    return checkpoint


def test_count_params(capsys):
    assert cli.run(["count-params", "--spec", "mobile.conv.avg.bin.33.200.64"]) == 0
    assert "970477" in capsys.readouterr().out

    assert cli.run(["count-params", "--spec", "a0.small"]) == 0
    assert "986748" in capsys.readouterr().out


def test_usage_errors(tmp_path):
    assert cli.run(["count-params", "--spec", "resnet.10"]) == 2
    assert cli.run(["count-params", "--spec", "a0.small", "--fast"]) == 2
    assert cli.run(["split", "--cache", str(tmp_path / "missing.bin"), "--holdout", "1"]) == 2
    assert cli.run(["tournament", "--ckpts", str(tmp_path / "a.pt")]) == 2
    assert cli.run(["fly"]) == 2


def test_ingest_and_split(tmp_path, capsys):
    sgf_dir = tmp_path / "sgf"
    sgf_dir.mkdir()
    (sgf_dir / "a.sgf").write_text("(;SZ[9]RE[W+R];B[ee];W[cc])")
    (sgf_dir / "b.sgf").write_text("(;SZ[9]RE[B+R];B[gg];W[cc];B[ee])")
    (sgf_dir / "c.sgf").write_text("(;SZ[9]HA[2]RE[B+R];W[cc])")
    cache = tmp_path / "corpus.bin"

    assert cli.run(["ingest", "--sgf-dir", str(sgf_dir), "--out", str(cache)]) == 0
    assert "accepted 2 games" in capsys.readouterr().out
    assert len(records.read_cache(cache)) == 2

    assert cli.run(["split", "--cache", str(cache), "--holdout", "1"]) == 0
    assert "validation samples: 1" in capsys.readouterr().out


def test_ingest_without_games(tmp_path):
    sgf_dir = tmp_path / "sgf"
    sgf_dir.mkdir()
    (sgf_dir / "a.sgf").write_text("(;SZ[9];B[ee])")

    assert cli.run(["ingest", "--sgf-dir", str(sgf_dir), "--out", str(tmp_path / "c.bin")]) == 1


def test_train_and_eval(tmp_path, capsys):
    checkpoint = _checkpoint(tmp_path)
    net = network.PolicyValueNet.load(checkpoint)

    assert net.spec.board == 9
    assert net.spec.name == "mobile.conv.avg.1.8.16"

    capsys.readouterr()

    assert cli.run(["eval", "--ckpt", str(checkpoint), "--cache", str(tmp_path / "corpus.bin"), "--samples", "8"]) == 0
    assert "policy_accuracy" in capsys.readouterr().out


def test_train_log(tmp_path):
    cache = _cache(tmp_path / "corpus.bin")
    log = tmp_path / "log.csv"

    code = cli.run(
        [
            "train",
            "--cache", str(cache),
            "--spec", "a0.1.8",
            "--value-loss", "bce",
            "--epochs", "1",
            "--batch", "4",
            "--epoch-samples", "8",
            "--holdout", "1",
            "--out", str(tmp_path / "net.pt"),
            "--log", str(log),
        ]
    )

    assert code == 0
    assert len(pd.read_csv(log)) == 1
    assert network.PolicyValueNet.load(tmp_path / "net.pt").spec.value_loss == "bce"


def test_bench(tmp_path):
    checkpoint = _checkpoint(tmp_path)
    out = tmp_path / "speed.csv"

    assert cli.run(["bench", "--ckpt", str(checkpoint), "--batches", "1,2", "--duration", "0.01", "--out", str(out)]) == 0
    assert list(pd.read_csv(out)["batch"]) == [1, 2]

    assert cli.run(["bench", "--ckpt", str(checkpoint), "--batches", "0"]) == 2

    labelled = tmp_path / "labelled.csv"
    code = cli.run(
        ["bench", "--ckpt", str(checkpoint), "--batches", "1", "--duration", "0.01", "--label", "RTX 2080 Ti", "--out", str(labelled)]
    )

    assert code == 0
    assert list(pd.read_csv(labelled)["device"]) == ["RTX 2080 Ti"]


def test_tournament(tmp_path):
    first = _checkpoint(tmp_path, "first")
    second = _checkpoint(tmp_path, "second")
    out = tmp_path / "table.csv"

    code = cli.run(
        [
            "tournament",
            "--ckpts", f"{first},{second}",
            "--games", "2",
            "--evaluations", "0",
            "--out", str(out),
        ]
    )

    assert code == 0
    assert sorted(pd.read_csv(out)["name"]) == ["first", "second"]


@pytest.mark.parametrize("ply", [0, 3])
def test_encode_dump(tmp_path, capsys, ply):
    cache = _cache(tmp_path / "corpus.bin")
    image = tmp_path / "planes.png"

    assert cli.run(["encode-dump", "--cache", str(cache), "--game", "0", "--ply", str(ply), "--image", str(image)]) == 0
    assert "plane 20" in capsys.readouterr().out
    assert image.is_file()

    assert cli.run(["encode-dump", "--cache", str(cache), "--game", "9", "--ply", "0"]) == 1


def test_tournament_parallel_search(tmp_path):
    first = _checkpoint(tmp_path, "first")
    second = _checkpoint(tmp_path, "second")
    out = tmp_path / "table.csv"

    code = cli.run(
        [
            "tournament",
            "--ckpts", f"{first},{second}",
            "--games", "2",
            "--evaluations", "2",
            "--workers", "2",
            "--out", str(out),
        ]
    )

    assert code == 0
    assert list(pd.read_csv(out)["games"]) == [2, 2]


def test_efficiency(tmp_path):
    cache = _cache(tmp_path / "corpus.bin")
    out = tmp_path / "efficiency.csv"
    image = tmp_path / "efficiency.png"

    code = cli.run(
        [
            "efficiency",
            "--cache", str(cache),
            "--specs", "a0.1.8,mobile.1.8.16",
            "--holdout", "1",
            "--epochs", "1",
            "--batch", "4",
            "--epoch-samples", "8",
            "--out", str(out),
            "--image", str(image),
        ]
    )

    assert code == 0
    assert list(pd.read_csv(out)["family"]) == ["az_residual", "mobile_bottleneck"]
    assert image.is_file()

    assert cli.run(["efficiency", "--cache", str(cache), "--specs", "a0.1.8", "--holdout", "0"]) == 2
    assert cli.run(["efficiency", "--cache", str(cache), "--specs", "resnet.3", "--holdout", "1"]) == 2
