import argparse
import hashlib
import json
from pathlib import Path
from typing import Optional

from ..config import get_settings, resolve_data_dir
from ..errors import ConfigInvalid
from ..features import EXTRACTOR_VERSION
from ..schemas import DatasetName, FeatureConfig

DEFAULT_SEED = 42


def fmt(value: float) -> str:
    return f"{value:.4f}"


def print_config(command: str, **values) -> None:
    """Echo the resolved configuration of a run as one JSON line."""
    payload = {"command": command}
    for key, value in values.items():
        payload[key] = value.model_dump(mode="json") if hasattr(value, "model_dump") else value
    print(json.dumps(payload, sort_keys=True, default=str))


def add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--dataset", choices=[d.value for d in DatasetName], default=DatasetName.mnist.value,
        help="Dataset whose upstream IDX files to read",
    )
    add_data_dir_arg(parser)


def add_data_dir_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--data-dir", "--mnist-dir", "--emnist-dir", dest="data_dir", default=None,
        help="Directory holding the IDX files of the chosen dataset (falls back to $CURVGLYPH_DATA_DIR)",
    )


def add_split_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Split / shuffle seed")
    parser.add_argument("--test-fraction", type=float, default=0.2, help="Stratified test share of the dataset")
    parser.add_argument("--val-fraction", type=float, default=0.1, help="Validation share of the training portion")
    parser.add_argument(
        "--stratify-val", action="store_true",
        help="Stratify the validation hold-out by class instead of drawing it uniformly",
    )


def add_feature_args(parser: argparse.ArgumentParser) -> None:
    defaults = FeatureConfig()
    parser.add_argument("--eps", type=float, default=defaults.eps, help="Curvature denominator guard")
    parser.add_argument("--sign-floor", type=float, default=defaults.sign_floor, help="|κ| at or below this gets sign 0")
    parser.add_argument(
        "--pre-blur-sigma", type=float, default=defaults.pre_blur_sigma,
        help="Gaussian blur before differentiation (0 = off)",
    )


def feature_config_from(args: argparse.Namespace) -> FeatureConfig:
    try:
        return FeatureConfig(eps=args.eps, sign_floor=args.sign_floor, pre_blur_sigma=args.pre_blur_sigma)
    except ValueError as exc:
        raise ConfigInvalid(f"Invalid feature options: {exc}") from exc


def require_data_dir(flag_value: Optional[str]) -> Path:
    data_dir = resolve_data_dir(flag_value)
    if data_dir is None:
        raise ConfigInvalid("No data directory: pass --data-dir or set CURVGLYPH_DATA_DIR")
    return data_dir


def cache_key(feature_cfg: FeatureConfig, test_fraction: float, val_fraction: float, stratify_val: bool) -> str:
    """Short digest of every option that changes the cached features or split."""
    options = {
        "feature_config": feature_cfg.model_dump(mode="json"),
        "test_fraction": test_fraction,
        "val_fraction": val_fraction,
        "stratify_val": stratify_val,
    }
    return hashlib.sha256(json.dumps(options, sort_keys=True).encode()).hexdigest()[:12]


def default_cache_path(args: argparse.Namespace, feature_cfg: FeatureConfig) -> Path:
    subset = f"-n{args.subset}" if args.subset is not None else ""
    key = cache_key(feature_cfg, args.test_fraction, args.val_fraction, args.stratify_val)
    return get_settings().cache_dir / f"{args.dataset}-{EXTRACTOR_VERSION}-seed{args.seed}{subset}-{key}.cgf"
