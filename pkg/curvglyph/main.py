"""
curvglyph – curvature and orientation descriptors for handwritten glyphs,
classified with a batch-normalised MLP.
"""
import argparse
import logging
import sys
from typing import Optional, Sequence

from . import __version__
from .commands import COMMANDS
from .config import get_settings
from .errors import EXIT_RUNTIME, EXIT_USAGE, CurvGlyphError

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; usage errors here exit with 1. Flags must be spelled out."""

    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curvglyph", description=__doc__.strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(format="%(levelname)s: %(message)s")

    try:
        logging.getLogger().setLevel(logging.DEBUG if args.verbose else get_settings().log_level)
        return args.handler(args)
    except CurvGlyphError as exc:
        logger.error("%s: %s", type(exc).__name__, exc.detail)
        return exc.exit_code
    except Exception:
        logger.exception("Unexpected failure in %s", args.command)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
