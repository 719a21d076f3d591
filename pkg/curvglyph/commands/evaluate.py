import argparse

from ..storage import load_checkpoint, load_feature_cache
from ..training import evaluate_detailed
from .common import fmt, print_config

SPLITS = ("test", "val", "fit")


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "eval",
        help="Evaluate a checkpoint on one split of a feature cache",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--checkpoint", required=True, help="Checkpoint directory written by `train`")
    parser.add_argument("--features", required=True, help="Feature cache written by `extract`")
    parser.add_argument("--split", choices=SPLITS, default="test", help="Which split to score")
    parser.add_argument("--top-pairs", type=int, default=5, help="How many confused class pairs to list")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    print_config("eval", checkpoint=args.checkpoint, features=args.features, split=args.split)
    cache = load_feature_cache(args.features)
    model = load_checkpoint(args.checkpoint, expected_num_classes=cache.header.num_classes)
    indices = getattr(cache.split, f"{args.split}_indices")

    summary = evaluate_detailed(model, cache.features, cache.labels, indices)
    print(f"n={summary.n}")
    print(f"{args.split}_loss={fmt(summary.loss)}")
    print(f"{args.split}_top1={fmt(summary.top1)}")
    print(f"macro_f1={fmt(summary.macro_f1)}")
    print(f"balanced_accuracy={fmt(summary.balanced_accuracy)}")
    for pair in summary.confused_pairs[: args.top_pairs]:
        print(f"confused {pair.true_class}->{pair.predicted_class} count={pair.count}")
    return 0
