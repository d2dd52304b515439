"""zsba-adapter: export embeddings, masks and metadata for the pipeline."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import AdapterError
from .export import ExportJob, run_export


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zsba-adapter")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="run the encoders and write an export")
    p.add_argument("--images", required=True, help="directory of input images")
    p.add_argument("--tasks", required=True, help="task file (JSON)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--with-masks", action="store_true", help="also generate and export masks")
    p.add_argument(
        "--encoder",
        default="hash",
        help="'hash' (deterministic, no downloads) or a CLIP model id",
    )
    p.add_argument(
        "--mask-model",
        default="grid",
        help="'grid' (deterministic, no downloads) or a SAM model id",
    )
    p.add_argument("--min-area", type=int, default=0, help="drop masks smaller than this")
    p.add_argument("--hash-dim", type=int, default=64, help="dimension of hash embeddings")
    p.add_argument("--grid", default="3x3", help="grid mask layout, e.g. 2x4")
    p.set_defaults(func=cmd_export)
    return parser


def cmd_export(args) -> int:
    try:
        rows, cols = (int(v) for v in args.grid.lower().split("x"))
    except ValueError:
        print(f"error: --grid expects ROWSxCOLS, got {args.grid!r}", file=sys.stderr)
        return 1
    job = ExportJob(
        images_dir=Path(args.images),
        tasks_path=Path(args.tasks),
        out_dir=Path(args.out),
        encoder=args.encoder,
        mask_model=args.mask_model,
        with_masks=args.with_masks,
        min_mask_area=args.min_area,
        hash_dim=args.hash_dim,
        grid_rows=rows,
        grid_cols=cols,
    )
    summary = run_export(job)
    print(
        f"exported {summary.text_records} text, {summary.image_records} image and "
        f"{summary.mask_records} masked-image embeddings for "
        f"{len(summary.image_ids)} image(s)"
    )
    if summary.failures:
        for failure in summary.failures:
            print(f"failed: {failure['image_id']}: {failure['error']}", file=sys.stderr)
        return 4
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        return 1 if code == 2 else code
    try:
        return args.func(args)
    except (AdapterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
