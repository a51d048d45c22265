"""Command-line wrapper mirroring ExportJob's fields."""

from __future__ import annotations

import argparse
import sys

from .export import MODES, ExportJob, export


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="embed-export",
        description="encode documents/categories and write labelrefine input files",
    )
    p.add_argument("--model", required=True,
                   help="checkpoint id/path, or hash:<dim> for the test backend")
    p.add_argument("--input", required=True, help="one document per line")
    p.add_argument("--output", required=True)
    p.add_argument("--mode", choices=MODES, default="dual-embeddings")
    p.add_argument("--categories", default=None,
                   help="one category per line (single-scores mode)")
    p.add_argument("--max-seq-len", type=int, default=128)
    p.add_argument("--batch-size", type=int, default=32)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = ExportJob(
        model=args.model,
        input_path=args.input,
        output_path=args.output,
        mode=args.mode,
        categories_path=args.categories,
        max_seq_len=args.max_seq_len,
        batch_size=args.batch_size,
    )
    try:
        export(job)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
