import argparse

from ..idx import load_dataset
from ..splits import stratified_split
from .common import add_dataset_args, add_split_args, print_config, require_data_dir


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "split-info",
        help="Print split sizes and per-class test counts without extracting features",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    add_dataset_args(parser)
    add_split_args(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    data_dir = require_data_dir(args.data_dir)
    print_config(
        "split-info",
        dataset=args.dataset,
        data_dir=str(data_dir),
        seed=args.seed,
        test_fraction=args.test_fraction,
        val_fraction=args.val_fraction,
        stratify_val=args.stratify_val,
    )
    plan = stratified_split(
        load_dataset(args.dataset, data_dir),
        test_fraction=args.test_fraction,
        val_fraction_of_train=args.val_fraction,
        seed=args.seed,
        stratify_val=args.stratify_val,
    )
    summary = plan.summary()
    print(f"total={summary.total}")
    print(f"fit={summary.fit} val={summary.val} test={summary.test}")
    for label, count in enumerate(summary.test_per_class):
        print(f"test_class_{label}={count}")
    return 0
