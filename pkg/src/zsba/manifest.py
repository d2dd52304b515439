"""Dataset manifests: which images a run covers, with optional ground truth.

Manifest file (JSON, UTF-8):

    {"task_id": str,
     "samples": [{"image_id": str,
                  "ground_truth": int,      # classification, optional
                  "gt_map_path": str}]}     # segmentation, optional

For classification tasks ground_truth is the category index; for
segmentation tasks gt_map_path names a PGM label map (resolved relative to
the manifest file when not absolute). Samples without ground truth are
legal; they are classified or segmented but skipped by the report.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import ManifestError, ParseError


@dataclass(frozen=True)
class ManifestSample:
    image_id: str
    ground_truth: int | None = None
    gt_map_path: str | None = None


@dataclass(frozen=True)
class DatasetManifest:
    task_id: str
    samples: tuple[ManifestSample, ...]


def load_manifest(path: str | os.PathLike) -> DatasetManifest:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("task_id"), str):
        raise ManifestError(f"{path}: expected an object with a string 'task_id'")
    raw = doc.get("samples")
    if not isinstance(raw, list):
        raise ManifestError(f"{path}: 'samples' must be a list")
    samples: list[ManifestSample] = []
    seen: set[str] = set()
    for pos, entry in enumerate(raw):
        where = f"{path}: samples[{pos}]"
        if not isinstance(entry, dict) or not isinstance(entry.get("image_id"), str):
            raise ManifestError(f"{where}: expected an object with a string 'image_id'")
        image_id = entry["image_id"]
        if not image_id:
            raise ManifestError(f"{where}: empty image_id")
        if image_id in seen:
            raise ManifestError(f"{where}: duplicate image_id {image_id!r}")
        seen.add(image_id)
        gt = entry.get("ground_truth")
        if gt is not None and (not isinstance(gt, int) or isinstance(gt, bool) or gt < 0):
            raise ManifestError(f"{where}: ground_truth must be a non-negative integer")
        gt_map = entry.get("gt_map_path")
        if gt_map is not None and not isinstance(gt_map, str):
            raise ManifestError(f"{where}: gt_map_path must be a string")
        samples.append(ManifestSample(image_id, gt, gt_map))
    return DatasetManifest(task_id=doc["task_id"], samples=tuple(samples))


def save_manifest(manifest: DatasetManifest, path: str | os.PathLike) -> None:
    samples = []
    for s in manifest.samples:
        entry: dict = {"image_id": s.image_id}
        if s.ground_truth is not None:
            entry["ground_truth"] = s.ground_truth
        if s.gt_map_path is not None:
            entry["gt_map_path"] = s.gt_map_path
        samples.append(entry)
    doc = {"task_id": manifest.task_id, "samples": samples}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def resolve_gt_path(manifest_path: str | os.PathLike, gt_map_path: str) -> Path:
    """Ground-truth map paths are relative to the manifest's directory."""
    p = Path(gt_map_path)
    if p.is_absolute():
        return p
    return Path(manifest_path).parent / p
