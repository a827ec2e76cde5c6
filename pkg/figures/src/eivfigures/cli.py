"""Command-line entry point: ``figures <fig1|fig2|fig3> --in DIR --out DIR``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import RENDERERS, ColumnError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render SVG panels from eiv-gibbs experiment CSV outputs",
    )
    parser.add_argument("which", choices=sorted(RENDERERS))
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the experiment CSVs")
    parser.add_argument("--out", dest="out_dir", required=True,
                        help="directory to write SVG panels into")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        written = RENDERERS[args.which](Path(args.in_dir), out_dir)
    except (ColumnError, FileNotFoundError, ValueError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
