import argparse
import logging
from pathlib import Path

from ..config import build_train_config
from ..nn import count_parameters, init_model
from ..schemas import TrainConfig
from ..storage import load_feature_cache, save_checkpoint
from ..training import train
from .common import fmt, print_config

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    defaults = TrainConfig()
    parser = subparsers.add_parser(
        "train",
        help="Train the MLP on a feature cache and write a checkpoint",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--features", required=True, help="Feature cache written by `extract`")
    parser.add_argument("--out", required=True, help="Checkpoint directory to create")
    parser.add_argument("--batch-size", type=int, default=defaults.batch_size, help="Mini-batch size")
    parser.add_argument("--lr", type=float, default=defaults.lr0, help="Initial Adam learning rate")
    parser.add_argument("--max-epochs", type=int, default=defaults.max_epochs, help="Upper bound on epochs")
    parser.add_argument("--es-patience", type=int, default=defaults.es_patience, help="Early-stopping patience")
    parser.add_argument(
        "--plateau-patience", type=int, default=defaults.plateau_patience, help="Plateau patience on val_loss"
    )
    parser.add_argument("--min-lr", type=float, default=defaults.min_lr, help="Learning-rate floor")
    parser.add_argument("--seed", type=int, default=defaults.seed, help="Initialisation / shuffle / dropout seed")
    parser.add_argument(
        "--deterministic", action="store_true",
        help="Single-threaded BLAS and zeroed wall times for byte-identical outputs",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    cfg = build_train_config(
        batch_size=args.batch_size,
        lr0=args.lr,
        max_epochs=args.max_epochs,
        es_patience=args.es_patience,
        plateau_patience=args.plateau_patience,
        min_lr=args.min_lr,
        seed=args.seed,
        deterministic=args.deterministic,
    )
    print_config("train", features=args.features, out=args.out, train_config=cfg)

    cache = load_feature_cache(args.features)
    model = init_model(cache.header.num_classes, cfg.seed)
    logger.info("Initialised %d-class model with %d trainable parameters",
                model.num_classes, count_parameters(model))

    model, report = train(model, cache.features, cache.labels, cache.split, cfg)
    save_checkpoint(model, report, Path(args.out))

    best = report.best_record
    print(f"epochs={len(report.records)} best_epoch={report.best_epoch}")
    print(f"val_loss={fmt(best.val_loss)} val_top1={fmt(best.val_acc)}")
    if report.test_accuracy is not None:
        print(f"test_top1={fmt(report.test_accuracy)}")
    print(f"checkpoint={args.out}")
    return 0
