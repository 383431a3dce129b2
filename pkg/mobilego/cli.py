"""Command-line entry point.

Exit codes: 0 on success, 2 on usage errors (bad flags, missing files,
unknown network names) and 1 on runtime errors.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

import mobilego.utils.constants as c
import mobilego.utils.exception as e
from mobilego.arena.bench import throughput_bench
from mobilego.arena.tournament import Player, round_robin
from mobilego.game.encoder import describe, encode
from mobilego.game.records import ingest, read_cache, sample_batch, split, write_cache
from mobilego.gtp.engine import EngineSession
from mobilego.models.netspec import count_params, parse_name
from mobilego.models.network import PolicyValueNet
from mobilego.search.evaluator import BatchedEvaluator, NetEvaluator
from mobilego.search.puct import Budget
from mobilego.training.config import TrainConfig
from mobilego.training.trainer import by_family, efficiency, evaluate, train
from mobilego.utils import logging
from mobilego.visual.convergence import plot_efficiency
from mobilego.visual.image import create_mosaic

logger = logging.get_logger(__name__)


def _batches(text: str) -> List[int]:
    try:
        sizes = [int(b) for b in text.split(",") if b]
    except ValueError:
        raise argparse.ArgumentTypeError(f"`{text}` is not a comma-separated list of integers")

    return sizes


def _paths(text: str) -> List[Path]:
    return [Path(p) for p in text.split(",") if p]


def _names(text: str) -> List[str]:
    return [n for n in text.split(",") if n]


def build_parser() -> argparse.ArgumentParser:
    """Builds the parser of every command."""

    parser = argparse.ArgumentParser(prog="mobilego", description="Go networks: data, training, search and play.")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("ingest", help="parse SGF files into a binary cache")
    p.add_argument("--sgf-dir", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = commands.add_parser("split", help="hold games out of a cache for validation")
    p.add_argument("--cache", type=Path, required=True)
    p.add_argument("--holdout", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = commands.add_parser("train", help="train a network on a cache")
    p.add_argument("--cache", type=Path, required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--value-loss", choices=["mse", "bce"])
    p.add_argument("--value-weight", type=int)
    p.add_argument("--batch", type=int, default=c.BATCH_SIZE)
    p.add_argument("--epoch-samples", type=int, default=c.EPOCH_SAMPLES)
    p.add_argument("--epochs", type=int, default=c.TOTAL_EPOCHS)
    p.add_argument("--holdout", type=int, default=0)
    p.add_argument("--momentum", type=float, default=0.0)
    p.add_argument("--workers", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--log", type=Path)

    p = commands.add_parser("eval", help="evaluate a checkpoint on sampled states")
    p.add_argument("--ckpt", type=Path, required=True)
    p.add_argument("--cache", type=Path, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = commands.add_parser("efficiency", help="validation metrics against parameter counts")
    p.add_argument("--cache", type=Path, required=True)
    p.add_argument("--specs", type=_names, required=True)
    p.add_argument("--holdout", type=int, required=True)
    p.add_argument("--batch", type=int, default=c.BATCH_SIZE)
    p.add_argument("--epoch-samples", type=int, default=c.EPOCH_SAMPLES)
    p.add_argument("--epochs", type=int, default=c.TOTAL_EPOCHS)
    p.add_argument("--momentum", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metric", choices=["accuracy", "mse"], default="accuracy")
    p.add_argument("--out", type=Path)
    p.add_argument("--image", type=Path)

    p = commands.add_parser("count-params", help="print the parameter count of a network")
    p.add_argument("--spec", required=True)
    p.add_argument("--board", type=int, default=c.DEFAULT_SIZE)

    p = commands.add_parser("bench", help="measure inference throughput")
    p.add_argument("--ckpt", type=Path, required=True)
    p.add_argument("--batches", type=_batches, default=[16, 64, 256, 1024, 4096])
    p.add_argument("--device", choices=["cpu", "cuda"], default="cpu")
    p.add_argument("--label", help="hardware name for the report, e.g. \"RTX 2080 Ti\"")
    p.add_argument("--duration", type=float, default=1.0)
    p.add_argument("--out", type=Path)

    p = commands.add_parser("tournament", help="round robin between checkpoints")
    p.add_argument("--ckpts", type=_paths, required=True)
    p.add_argument("--games", type=int, default=2)
    p.add_argument("--movetime", type=float, default=c.MOVETIME)
    p.add_argument("--evaluations", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path)

    p = commands.add_parser("gtp", help="serve the Go Text Protocol on stdin/stdout")
    p.add_argument("--ckpt", type=Path, required=True)
    p.add_argument("--movetime", type=float, default=c.MOVETIME)
    p.add_argument("--evaluations", type=int)
    p.add_argument("--randomize", action="store_true")

    p = commands.add_parser("encode-dump", help="print the input planes of a state")
    p.add_argument("--cache", type=Path, required=True)
    p.add_argument("--game", type=int, required=True)
    p.add_argument("--ply", type=int, required=True)
    p.add_argument("--image", type=Path)

    return parser


def _budget(args: argparse.Namespace) -> Optional[Budget]:
    """Evaluation budget when given, else the move time (0 means policy-only)."""

    if args.evaluations is not None:
        return Budget(evaluations=args.evaluations) if args.evaluations > 0 else None

    return Budget(milliseconds=args.movetime) if args.movetime > 0 else None


def _validate(args: argparse.Namespace) -> None:
    """Checks flags and input files before any work."""

    for name in ("cache", "ckpt"):
        path = getattr(args, name, None)
        if path is not None and not path.is_file():
            raise e.ArgumentError(f"`--{name}` {path} does not exist")

    if args.command == "ingest" and not args.sgf_dir.is_dir():
        raise e.ArgumentError(f"`--sgf-dir` {args.sgf_dir} is not a directory")

    if args.command in ("train", "count-params"):
        parse_name(args.spec)

    if args.command == "efficiency":
        if not args.specs:
            raise e.ArgumentError("`--specs` should name at least one network")
        for name in args.specs:
            parse_name(name)
        if args.holdout < 1:
            raise e.ArgumentError("`--holdout` should be >= 1")

    if args.command in ("train", "efficiency"):
        for flag in ("batch", "epoch_samples"):
            if getattr(args, flag) < 1:
                raise e.ArgumentError(f"`--{flag.replace('_', '-')}` should be >= 1")
        if args.epochs < 0 or args.holdout < 0 or getattr(args, "workers", 0) < 0:
            raise e.ArgumentError("`--epochs`, `--holdout` and `--workers` should be >= 0")
        if getattr(args, "value_weight", None) is not None and args.value_weight < 1:
            raise e.ArgumentError("`--value-weight` should be >= 1")

    if args.command == "bench":
        if not args.batches or min(args.batches) < 1:
            raise e.ArgumentError("`--batches` should list sizes >= 1")
        if args.duration <= 0:
            raise e.ArgumentError("`--duration` should be > 0")

    if args.command == "tournament":
        if len(args.ckpts) < 2:
            raise e.ArgumentError("`--ckpts` should name at least two checkpoints")
        missing = [str(p) for p in args.ckpts if not p.is_file()]
        if missing:
            raise e.ArgumentError(f"`--ckpts` {', '.join(missing)} do not exist")
        if args.games < 1 or args.workers < 1:
            raise e.ArgumentError("`--games` and `--workers` should be >= 1")

    if args.command in ("tournament", "gtp") and args.movetime < 0:
        raise e.ArgumentError("`--movetime` should be >= 0")

    if args.command == "eval" and args.samples < 1:
        raise e.ArgumentError("`--samples` should be >= 1")


def _ingest(args: argparse.Namespace) -> None:
    corpus, rejected = ingest(sorted(args.sgf_dir.rglob("*.sgf")))
    if not len(corpus):
        raise e.ValueError(f"no game of {args.sgf_dir} could be ingested")

    write_cache(corpus, args.out)

    print(f"accepted {len(corpus)} games ({corpus.n_states} states), rejected {sum(rejected.values())}")
    for reason, count in sorted(rejected.items()):
        print(f"  {reason}: {count}")


def _split(args: argparse.Namespace) -> None:
    s = split(read_cache(args.cache), args.holdout, args.seed)

    print(f"training games: {len(s.train)} ({s.train.n_states} states)")
    print(f"validation samples: {len(s.validation)}")


def _train(args: argparse.Namespace) -> None:
    corpus = read_cache(args.cache)

    spec = parse_name(args.spec, board=corpus.size)
    if args.value_loss:
        spec = replace(spec, value_loss=args.value_loss)
    if args.value_weight:
        spec = replace(spec, value_weight=args.value_weight)

    cfg = TrainConfig(
        value_loss=spec.value_loss,
        value_weight=spec.value_weight,
        batch_size=args.batch,
        epoch_samples=args.epoch_samples,
        total_epochs=args.epochs,
        seed=args.seed,
        momentum=args.momentum,
        workers=args.workers,
    )

    _, log = train(spec, split(corpus, args.holdout, args.seed), cfg, args.out, args.log)

    print(f"trained {spec.name} for {len(log)} epochs, checkpoint {args.out}")


def _eval(args: argparse.Namespace) -> None:
    net = PolicyValueNet.load(args.ckpt)
    samples = sample_batch(read_cache(args.cache), args.samples, np.random.default_rng(args.seed))

    metrics = evaluate(net, samples)

    print(f"policy_accuracy {metrics.policy_accuracy:.4f}")
    print(f"value_mse {metrics.value_mse:.4f}")


def _efficiency(args: argparse.Namespace) -> None:
    corpus = read_cache(args.cache)
    specs = [parse_name(name, board=corpus.size) for name in args.specs]

    cfg = TrainConfig(
        batch_size=args.batch,
        epoch_samples=args.epoch_samples,
        total_epochs=args.epochs,
        seed=args.seed,
        momentum=args.momentum,
    )

    frame = efficiency(specs, split(corpus, args.holdout, args.seed), cfg)

    print(frame.to_string(index=False))
    if args.out:
        frame.to_csv(args.out, index=False, float_format="%.4f")
    if args.image:
        plot_efficiency(by_family(frame), metric=args.metric, title="Parameter efficiency", output=args.image)


def _count_params(args: argparse.Namespace) -> None:
    print(count_params(parse_name(args.spec, board=args.board)))


def _bench(args: argparse.Namespace) -> None:
    report = throughput_bench(
        PolicyValueNet.load(args.ckpt), args.batches, args.device, args.duration, label=args.label
    )

    print(report.to_frame().to_string(index=False))
    if args.out:
        report.to_csv(args.out)


def _tournament(args: argparse.Namespace) -> None:
    nets = [PolicyValueNet.load(p) for p in args.ckpts]

    boards = {net.spec.board for net in nets}
    if len(boards) > 1:
        raise e.ValueError(f"checkpoints are for different board sizes {sorted(boards)}")

    names = [p.stem for p in args.ckpts]
    if len(set(names)) < len(names):
        names = [str(p) for p in args.ckpts]

    players = []
    for name, net in zip(names, nets):
        evaluator = NetEvaluator(net)
        if args.workers > 1:
            evaluator = BatchedEvaluator(evaluator, max_batch=args.workers)
        players.append(Player(name, evaluator))

    table = round_robin(
        players, args.games, _budget(args), seed=args.seed, size=boards.pop(), workers=args.workers
    )

    print(table.to_frame().to_string(index=False))
    if args.out:
        table.to_csv(args.out)


def _gtp(args: argparse.Namespace) -> None:
    net = PolicyValueNet.load(args.ckpt)

    session = EngineSession(
        NetEvaluator(net), size=net.spec.board, budget=_budget(args), randomize=args.randomize
    )
    session.serve()


def _encode_dump(args: argparse.Namespace) -> None:
    corpus = read_cache(args.cache)
    if not 0 <= args.game < len(corpus):
        raise e.ValueError(f"`--game` should be in [0, {len(corpus)})")

    planes = encode(corpus.games[args.game].position_at(args.ply))

    print("\n\n".join(describe(planes)))
    if args.image:
        create_mosaic(planes, output=args.image)


COMMANDS: Dict[str, Callable[[argparse.Namespace], None]] = {
    "ingest": _ingest,
    "split": _split,
    "train": _train,
    "eval": _eval,
    "efficiency": _efficiency,
    "count-params": _count_params,
    "bench": _bench,
    "tournament": _tournament,
    "gtp": _gtp,
    "encode-dump": _encode_dump,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Runs one command.

    Args:
        argv: Arguments without the program name (``sys.argv[1:]`` by default).

    Returns:
        The exit code.

    """

    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exit:
        return 0 if exit.code is None else int(exit.code)

    if args.command == "gtp":
        logging.redirect_console(sys.stderr)

    try:
        _validate(args)
    except (e.ArgumentError, e.ValueError) as error:
        print(f"mobilego {args.command}: error: {error}", file=sys.stderr)
        return 2

    logger.info("Configuration: %s.", {k: v for k, v in vars(args).items()})

    try:
        COMMANDS[args.command](args)
    except Exception as error:
        logger.exception("`%s` failed.", args.command)
        print(f"mobilego {args.command}: {error}", file=sys.stderr)
        return 1

    return 0


def main() -> None:
    sys.exit(run())
