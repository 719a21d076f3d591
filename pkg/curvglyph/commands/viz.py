import argparse
from pathlib import Path

from ..errors import ConfigInvalid
from ..features import assemble_features, channel_images
from ..fixtures import constant_image, render_disc, render_ring
from ..idx import load_dataset
from ..pgm import write_pgm
from ..schemas import DatasetName
from .common import add_data_dir_arg, add_feature_args, feature_config_from, print_config, require_data_dir

SYNTHETIC = ("disc", "ring", "constant")


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "viz",
        help="Write the three feature channels of one glyph as PGM images",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument(
        "--source", choices=[d.value for d in DatasetName] + list(SYNTHETIC), default=DatasetName.mnist.value,
        help="Dataset glyph or synthetic fixture",
    )
    parser.add_argument("--index", type=int, default=0, help="Glyph index into the concatenated dataset")
    parser.add_argument("--radius", type=float, default=8.0, help="Radius of the disc / ring fixture")
    add_data_dir_arg(parser)
    parser.add_argument("--out", required=True, help="Output stem; writes <stem>_mag.pgm, <stem>_sign.pgm, <stem>_theta.pgm")
    add_feature_args(parser)
    parser.set_defaults(handler=run)


def _load_glyph(args: argparse.Namespace):
    if args.source == "disc":
        return render_disc(args.radius)
    if args.source == "ring":
        return render_ring(args.radius)
    if args.source == "constant":
        return constant_image()
    dataset = load_dataset(args.source, require_data_dir(args.data_dir))
    return dataset.glyph(args.index)


def run(args: argparse.Namespace) -> int:
    feature_cfg = feature_config_from(args)
    if args.radius <= 0:
        raise ConfigInvalid(f"--radius must be positive, got {args.radius}")
    print_config(
        "viz", source=args.source, index=args.index, radius=args.radius, out=args.out, feature_config=feature_cfg
    )
    maps = assemble_features(_load_glyph(args), feature_cfg)
    stem = Path(args.out)
    if stem.parent != Path("."):
        stem.parent.mkdir(parents=True, exist_ok=True)
    for suffix, pixels in channel_images(maps).items():
        path = write_pgm(stem.parent / f"{stem.name}_{suffix}.pgm", pixels)
        print(f"{suffix}={path}")
    return 0
