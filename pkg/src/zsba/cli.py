"""Command-line front door: classify, segment, validate, report.

Every run is deterministic; identical inputs produce byte-identical output
files regardless of worker count. Exit codes let scripts tell fixture gaps
from pipeline bugs:

    0  success
    1  usage error (bad flags, unknown task id)
    2  I/O or file-format error
    3  validation error (invariant violations, failed validate checks)
    4  run finished but some samples failed; see failures.jsonl
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import backend, metrics, netpbm
from .classify import SampleFailure, classify_batch
from .errors import FormatError, ParseError, ZsbaError
from .manifest import DatasetManifest, load_manifest, resolve_gt_path
from .segment import UNLABELED, segment_image
from .vocabulary import (
    TaskSpec,
    default_tasks_path,
    find_task,
    load_tasks,
    render_prompt,
    route_task,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_PARTIAL = 4


def _strictness(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument(
        "--strict",
        dest="strict",
        action="store_true",
        default=True,
        help="reject overlapping or empty masks (default)",
    )
    group.add_argument(
        "--lenient",
        dest="strict",
        action="store_false",
        help="repair mask violations: contested pixels go to the larger mask, "
        "emptied masks are dropped",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zsba",
        description="Zero-shot building attribute extraction over precomputed embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, masks: bool) -> None:
        p.add_argument("--tasks", help="task file (default: shipped presets)")
        p.add_argument("--task-id", required=True, help="task to run")
        p.add_argument("--embeddings", required=True, help="ZSBA embedding file")
        p.add_argument("--manifest", required=True, help="dataset manifest JSON")
        if masks:
            p.add_argument(
                "--masks-dir", required=True, help="directory of <image_id>.json mask files"
            )
            _strictness(p)

    p_classify = sub.add_parser("classify", help="run zero-shot classification")
    common(p_classify, masks=False)
    p_classify.add_argument("--out", required=True, help="output directory")
    p_classify.add_argument("--workers", type=int, default=1)
    p_classify.set_defaults(func=cmd_classify)

    p_segment = sub.add_parser("segment", help="run zero-shot segmentation")
    common(p_segment, masks=True)
    p_segment.add_argument("--out", required=True, help="output directory")
    p_segment.add_argument("--workers", type=int, default=1)
    p_segment.add_argument(
        "--overlay", action="store_true", help="also write PPM color overlays"
    )
    p_segment.add_argument(
        "--ignore-unlabeled",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="drop sentinel predictions from the report instead of tracking an "
        "'unlabeled' error class",
    )
    p_segment.set_defaults(func=cmd_segment)

    p_validate = sub.add_parser(
        "validate", help="check formats and key completeness before a run"
    )
    common(p_validate, masks=False)
    p_validate.add_argument("--masks-dir", help="mask directory (segmentation tasks)")
    _strictness(p_validate)
    p_validate.set_defaults(func=cmd_validate)

    p_report = sub.add_parser("report", help="re-render a saved report JSON")
    p_report.add_argument("report", help="path to a report.json")
    p_report.set_defaults(func=cmd_report)

    return parser


def _load_task(args) -> TaskSpec | None:
    tasks_path = args.tasks if args.tasks else default_tasks_path()
    tasks = load_tasks(tasks_path)
    task = find_task(tasks, args.task_id)
    if task is None:
        known = ", ".join(t.task_id for t in tasks)
        print(
            f"error: task {args.task_id!r} not found in {tasks_path} (known: {known})",
            file=sys.stderr,
        )
    return task


def _check_manifest_task(manifest: DatasetManifest, task: TaskSpec) -> None:
    if manifest.task_id != task.task_id:
        raise ZsbaError(
            f"manifest is for task {manifest.task_id!r}, requested {task.task_id!r}"
        )


def _write_failures(out: Path, failures) -> None:
    with open(out / "failures.jsonl", "w", encoding="utf-8") as fh:
        for f in failures:
            fh.write(json.dumps({"image_id": f.image_id, "error": f.error}) + "\n")


def cmd_classify(args) -> int:
    task = _load_task(args)
    if task is None:
        return EXIT_USAGE
    if route_task(task) != "classification":
        print(f"error: task {task.task_id!r} is not a classification task", file=sys.stderr)
        return EXIT_VALIDATION
    store = backend.load_embeddings(args.embeddings)
    manifest = load_manifest(args.manifest)
    _check_manifest_task(manifest, task)

    outcome = classify_batch(manifest, task, store, workers=max(1, args.workers))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "results.jsonl", "w", encoding="utf-8") as fh:
        for r in outcome.results:
            fh.write(
                json.dumps(
                    {
                        "image_id": r.image_id,
                        "task_id": r.task_id,
                        "predicted_index": r.predicted_index,
                        "predicted_name": r.predicted_name,
                        "scores": list(r.scores),
                    }
                )
                + "\n"
            )
    if outcome.failures:
        _write_failures(out, outcome.failures)
        print(f"{len(outcome.failures)} sample(s) failed; see failures.jsonl", file=sys.stderr)

    labeled = any(s.ground_truth is not None for s in manifest.samples)
    if labeled and outcome.results:
        report = metrics.classification_report(outcome.results, manifest, task)
        (out / "report.json").write_text(
            json.dumps(metrics.report_to_json_dict(report), indent=2) + "\n",
            encoding="utf-8",
        )
        print(metrics.report_to_table(report))

    return EXIT_PARTIAL if outcome.failures else EXIT_OK


def cmd_segment(args) -> int:
    task = _load_task(args)
    if task is None:
        return EXIT_USAGE
    if route_task(task) != "segmentation":
        print(f"error: task {task.task_id!r} is not a segmentation task", file=sys.stderr)
        return EXIT_VALIDATION
    store = backend.load_embeddings(args.embeddings)
    manifest = load_manifest(args.manifest)
    _check_manifest_task(manifest, task)
    masks_dir = Path(args.masks_dir)

    def run_one(sample):
        try:
            mask_set = backend.load_masks(
                masks_dir / f"{sample.image_id}.json", strict=args.strict
            )
            return segment_image(sample.image_id, mask_set, task, store), None
        except (ZsbaError, OSError) as exc:
            return None, SampleFailure(sample.image_id, f"{type(exc).__name__}: {exc}")

    workers = max(1, args.workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(run_one, manifest.samples))
    else:
        pairs = [run_one(s) for s in manifest.samples]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failures = []
    pred_maps: list[np.ndarray] = []
    gt_maps: list[np.ndarray] = []
    for sample, (labels, failure) in zip(manifest.samples, pairs):
        if failure is not None:
            failures.append(failure)
            continue
        netpbm.write_pgm(labels, out / f"{sample.image_id}.pgm")
        if args.overlay:
            netpbm.write_ppm(netpbm.colorize(labels), out / f"{sample.image_id}.ppm")
        if sample.gt_map_path is not None:
            gt = netpbm.read_pgm(resolve_gt_path(args.manifest, sample.gt_map_path))
            pred_maps.append(labels)
            gt_maps.append(gt)

    if failures:
        _write_failures(out, failures)
        print(f"{len(failures)} image(s) failed; see failures.jsonl", file=sys.stderr)

    if gt_maps:
        report = metrics.segmentation_report(
            pred_maps, gt_maps, task, count_unlabeled=not args.ignore_unlabeled
        )
        (out / "report.json").write_text(
            json.dumps(metrics.report_to_json_dict(report), indent=2) + "\n",
            encoding="utf-8",
        )
        print(metrics.report_to_table(report))

    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_validate(args) -> int:
    """Run every check; findings are output lines, never exceptions."""
    findings: list[tuple[bool, str]] = []

    def check(ok: bool, message: str) -> bool:
        findings.append((ok, message))
        return ok

    task = None
    try:
        tasks_path = args.tasks if args.tasks else default_tasks_path()
        tasks = load_tasks(tasks_path)
        check(True, f"tasks file: {len(tasks)} task(s) loaded from {tasks_path}")
        task = find_task(tasks, args.task_id)
        if task is None:
            check(False, f"task {args.task_id!r} not found in {tasks_path}")
        else:
            check(
                True,
                f"task {task.task_id!r}: {task.task_kind}, "
                f"{len(task.categories)} categories",
            )
    except (ZsbaError, OSError) as exc:
        check(False, f"tasks file: {type(exc).__name__}: {exc}")

    store = None
    try:
        store = backend.load_embeddings(args.embeddings)
        check(
            True,
            f"embeddings: {len(store)} record(s), dimension {store.dimension}",
        )
    except (ZsbaError, OSError) as exc:
        check(False, f"embeddings: {type(exc).__name__}: {exc}")

    manifest = None
    try:
        manifest = load_manifest(args.manifest)
        check(True, f"manifest: {len(manifest.samples)} sample(s)")
        if task is not None and manifest.task_id != task.task_id:
            check(
                False,
                f"manifest is for task {manifest.task_id!r}, requested {task.task_id!r}",
            )
    except (ZsbaError, OSError) as exc:
        check(False, f"manifest: {type(exc).__name__}: {exc}")

    if task is not None and store is not None:
        missing = [
            prompt
            for prompt in (render_prompt(task, c) for c in task.categories)
            if backend.text_key(prompt) not in store
        ]
        if missing:
            for prompt in missing:
                check(False, f"missing text embedding for prompt {prompt!r}")
        else:
            check(
                True,
                f"text embeddings present for all {len(task.categories)} rendered prompts",
            )

    if task is not None and store is not None and manifest is not None:
        if task.task_kind == "classification":
            n_classes = len(task.categories)
            for sample in manifest.samples:
                problems = []
                if backend.image_key(sample.image_id) not in store:
                    problems.append(f"missing embedding key {backend.image_key(sample.image_id)!r}")
                if sample.ground_truth is not None and sample.ground_truth >= n_classes:
                    problems.append(f"ground_truth {sample.ground_truth} out of range")
                if problems:
                    check(False, f"{sample.image_id}: " + "; ".join(problems))
                else:
                    check(True, f"{sample.image_id}: ok")
        else:
            if not args.masks_dir:
                check(False, "segmentation task but no --masks-dir given")
            else:
                masks_dir = Path(args.masks_dir)
                for sample in manifest.samples:
                    _validate_segmentation_sample(
                        check, sample, masks_dir, store, task, args
                    )

    failed = sum(1 for ok, _ in findings if not ok)
    for ok, message in findings:
        print(f"[{'ok' if ok else 'FAIL'}] {message}")
    print(f"{len(findings) - failed}/{len(findings)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


def _validate_segmentation_sample(check, sample, masks_dir, store, task, args) -> None:
    mask_path = masks_dir / f"{sample.image_id}.json"
    problems = []
    mask_set = None
    try:
        mask_set = backend.load_masks(mask_path, strict=args.strict)
    except (ZsbaError, OSError) as exc:
        problems.append(f"{mask_path}: {type(exc).__name__}: {exc}")
    if mask_set is not None:
        for mask in mask_set.masks:
            key = backend.image_key(sample.image_id, mask.id)
            if key not in store:
                problems.append(f"missing embedding key {key!r}")
        if sample.gt_map_path is not None:
            try:
                gt = netpbm.read_pgm(resolve_gt_path(args.manifest, sample.gt_map_path))
                if gt.shape != (mask_set.height, mask_set.width):
                    problems.append(
                        f"ground-truth map shape {gt.shape} does not match masks "
                        f"({mask_set.height}, {mask_set.width})"
                    )
                else:
                    bad = (gt >= len(task.categories)) & (gt != UNLABELED)
                    if bad.any():
                        problems.append(
                            f"ground-truth map holds invalid label {int(gt[bad][0])}"
                        )
            except (ZsbaError, OSError) as exc:
                problems.append(f"ground truth: {type(exc).__name__}: {exc}")
    if problems:
        check(False, f"{sample.image_id}: " + "; ".join(problems))
    else:
        check(True, f"{sample.image_id}: ok ({len(mask_set.masks)} masks)")


def cmd_report(args) -> int:
    doc = json.loads(Path(args.report).read_text(encoding="utf-8"))
    report = metrics.report_from_json_dict(doc)
    print(metrics.report_to_table(report))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return EXIT_USAGE if code == 2 else code
    try:
        return args.func(args)
    except (ParseError, FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ZsbaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
