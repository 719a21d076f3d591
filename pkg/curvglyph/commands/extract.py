import argparse
import logging

import numpy as np

from ..features import EXTRACTOR_VERSION, FEATURE_DIM, extract_features
from ..idx import load_dataset
from ..schemas import FeatureCacheHeader
from ..splits import stratified_split, stratified_subset
from ..storage import save_feature_cache
from .common import (
    add_dataset_args,
    add_feature_args,
    add_split_args,
    default_cache_path,
    feature_config_from,
    print_config,
    require_data_dir,
)

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "extract",
        help="Parse IDX files, split them and cache the curvature-orientation features",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    add_dataset_args(parser)
    add_split_args(parser)
    add_feature_args(parser)
    parser.add_argument("--out", default=None, help="Feature cache file (default: under $CURVGLYPH_CACHE_DIR)")
    parser.add_argument(
        "--subset", type=int, default=None,
        help="Keep a stratified sample of this many glyphs before splitting",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    feature_cfg = feature_config_from(args)
    data_dir = require_data_dir(args.data_dir)
    out = args.out or default_cache_path(args, feature_cfg)
    print_config(
        "extract",
        dataset=args.dataset,
        data_dir=str(data_dir),
        out=str(out),
        seed=args.seed,
        test_fraction=args.test_fraction,
        val_fraction=args.val_fraction,
        stratify_val=args.stratify_val,
        subset=args.subset,
        extractor_version=EXTRACTOR_VERSION,
        feature_config=feature_cfg,
    )

    dataset = load_dataset(args.dataset, data_dir)
    if args.subset is not None:
        dataset = stratified_subset(dataset, args.subset, seed=args.seed)
    plan = stratified_split(
        dataset,
        test_fraction=args.test_fraction,
        val_fraction_of_train=args.val_fraction,
        seed=args.seed,
        stratify_val=args.stratify_val,
    )
    features = extract_features(dataset.images, feature_cfg)

    header = FeatureCacheHeader(
        dataset=dataset.name,
        extractor_version=EXTRACTOR_VERSION,
        rows=len(features),
        cols=FEATURE_DIM,
        num_classes=dataset.num_classes,
        feature_config=feature_cfg,
        split=plan.summary(),
    )
    save_feature_cache(out, features, dataset.labels.astype(np.int32), plan, header)
    print(f"fit={len(plan.fit_indices)} val={len(plan.val_indices)} test={len(plan.test_indices)}")
    print(f"features={out}")
    return 0
