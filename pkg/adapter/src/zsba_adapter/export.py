"""The export job: run encoders once, write everything the pipeline reads.

Outputs under the job's output directory:

    embeddings.zsba        text + full-image + masked-image records
    masks/<image_id>.json  canonical RLE mask files (with --with-masks)
    metadata.json          model identifiers, preprocessing, policies

Masked-image embeddings are computed by zeroing everything outside the
mask (element-wise multiplication) before the encoder's own preprocessing,
so an all-ones mask yields exactly the full-image embedding. Per-image
failures are recorded and the job continues; metadata carries them.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .encoders import create_encoder
from .errors import AdapterError, ExportError
from .formats import image_key, text_key, write_embedding_file, write_mask_file
from .masks import create_mask_generator, filter_min_area, resolve_overlaps
from .tasks import load_tasks, rendered_prompts

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp")


@dataclass
class ExportJob:
    images_dir: Path
    tasks_path: Path
    out_dir: Path
    encoder: str = "hash"
    mask_model: str = "grid"
    with_masks: bool = False
    min_mask_area: int = 0
    hash_dim: int = 64
    grid_rows: int = 3
    grid_cols: int = 3


@dataclass
class ExportSummary:
    text_records: int = 0
    image_records: int = 0
    mask_records: int = 0
    image_ids: list[str] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)


def _load_image(path: Path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def _list_images(images_dir: Path) -> list[Path]:
    paths = sorted(
        p for p in images_dir.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )
    stems = [p.stem for p in paths]
    duplicates = {s for s in stems if stems.count(s) > 1}
    if duplicates:
        raise ExportError(f"duplicate image ids after stripping suffixes: {sorted(duplicates)}")
    return paths


def run_export(job: ExportJob) -> ExportSummary:
    tasks = load_tasks(job.tasks_path)
    if not tasks:
        raise ExportError(f"{job.tasks_path} defines no tasks")
    prompts = rendered_prompts(tasks)

    images_dir = Path(job.images_dir)
    if not images_dir.is_dir():
        raise ExportError(f"{images_dir} is not a directory")
    image_paths = _list_images(images_dir)

    encoder = create_encoder(job.encoder, hash_dim=job.hash_dim)
    generator = None
    if job.with_masks:
        generator = create_mask_generator(
            job.mask_model, grid_rows=job.grid_rows, grid_cols=job.grid_cols
        )

    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    masks_dir = out_dir / "masks"
    if job.with_masks:
        masks_dir.mkdir(exist_ok=True)

    summary = ExportSummary()
    records: list[tuple[str, np.ndarray]] = []
    for prompt in prompts:
        records.append((text_key(prompt), encoder.embed_text(prompt)))
    summary.text_records = len(records)

    for path in image_paths:
        image_id = path.stem
        try:
            rgb = _load_image(path)
        except Exception as exc:
            logger.warning("skipping %s: %s", path, exc)
            summary.failures.append({"image_id": image_id, "error": str(exc)})
            continue
        records.append((image_key(image_id), encoder.embed_image(rgb)))
        summary.image_records += 1
        summary.image_ids.append(image_id)

        if generator is None:
            continue
        try:
            raw = generator.generate(rgb)
        except AdapterError:
            raise
        except Exception as exc:
            summary.failures.append({"image_id": image_id, "error": f"mask generation: {exc}"})
            continue
        disjoint = resolve_overlaps(filter_min_area(raw, job.min_mask_area))
        named = [(f"m{j}", pixels) for j, pixels in enumerate(disjoint)]
        write_mask_file(masks_dir / f"{image_id}.json", rgb.shape[1], rgb.shape[0], named)
        for mask_id, pixels in named:
            masked = rgb * pixels[:, :, None].astype(np.uint8)
            records.append((image_key(image_id, mask_id), encoder.embed_image(masked)))
            summary.mask_records += 1

    dim = encoder.dim
    if dim is None:
        raise ExportError("encoder never reported its dimension")
    write_embedding_file(out_dir / "embeddings.zsba", dim, records)

    metadata = {
        "format": "zsba-export/1",
        "encoder": {
            "name": encoder.name,
            "dimension": dim,
            "preprocessing": encoder.preprocessing,
        },
        "mask_generator": None
        if generator is None
        else {
            "name": generator.name,
            "min_mask_area": job.min_mask_area,
            "overlap_resolution": "smallest-area-wins",
        },
        "masked_image_rule": "zero-fill multiplication before encoder preprocessing",
        "images": summary.image_ids,
        "failures": summary.failures,
    }
    (out_dir / "metadata.json").write_text(
        json.dumps(metadata, indent=2) + "\n", encoding="utf-8"
    )
    return summary
