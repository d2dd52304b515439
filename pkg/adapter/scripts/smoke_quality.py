#!/usr/bin/env python3
"""Non-gating quality smoke run: real embeddings on a handful of photos.

Exports embeddings for a directory of building photographs with a real
encoder, runs zero-shot roof-type and floor-count classification through
the pipeline CLI, and leaves everything under --out for eyeballing. No
numeric threshold is asserted; zero-shot quality on arbitrary photos is
not a pass/fail quantity. Requires model weights (network or cache).

    python scripts/smoke_quality.py --images ~/photos --out /tmp/smoke \
        [--encoder openai/clip-vit-base-patch32]
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys
from pathlib import Path

from zsba_adapter.export import ExportJob, run_export


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--images", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--encoder", default="openai/clip-vit-base-patch32")
    parser.add_argument("--tasks", default=None, help="defaults to the shipped presets")
    args = parser.parse_args()

    if args.tasks:
        tasks_path = Path(args.tasks)
    else:
        from zsba.vocabulary import default_tasks_path

        tasks_path = default_tasks_path()

    out = Path(args.out)
    export_dir = out / "export"
    summary = run_export(
        ExportJob(
            images_dir=Path(args.images),
            tasks_path=tasks_path,
            out_dir=export_dir,
            encoder=args.encoder,
            with_masks=False,
        )
    )
    print(f"exported embeddings for {len(summary.image_ids)} image(s)")

    for task_id in ("roof_type", "num_floors"):
        manifest = out / f"manifest_{task_id}.json"
        manifest.write_text(
            json.dumps(
                {
                    "task_id": task_id,
                    "samples": [{"image_id": i} for i in summary.image_ids],
                }
            ),
            encoding="utf-8",
        )
        run_dir = out / task_id
        proc = subprocess.run(
            [
                sys.executable, "-m", "zsba.cli", "classify",
                "--task-id", task_id,
                "--embeddings", str(export_dir / "embeddings.zsba"),
                "--manifest", str(manifest),
                "--out", str(run_dir),
            ]
        )
        if proc.returncode != 0:
            return proc.returncode
        print(f"\n{task_id} predictions ({run_dir / 'results.jsonl'}):")
        for line in (run_dir / "results.jsonl").read_text().splitlines():
            record = json.loads(line)
            print(f"  {record['image_id']}: {record['predicted_name']}")
    print("\ninspect the results above by eye; nothing here is asserted")
    return 0


if __name__ == "__main__":
    sys.exit(main())
