"""Shared fixture builders and independent oracles for the test suite.

The oracles here deliberately avoid the library's own code paths: the
segmentation oracle walks pixels in pure Python, and the binary-container
reference parser uses struct directly. Fixtures are hand-constructed so
every expected answer is known analytically.
"""

from __future__ import annotations

import json
import random
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from zsba.backend import (
    BinaryMask,
    EmbeddingStore,
    MaskSet,
    image_key,
    save_masks,
    text_key,
    write_embeddings,
)
from zsba.manifest import DatasetManifest, ManifestSample, save_manifest
from zsba.netpbm import write_pgm
from zsba.vocabulary import default_tasks_path, find_task, load_tasks, render_prompt


def basis(dim: int, index: int) -> list[float]:
    vec = [0.0] * dim
    vec[index] = 1.0
    return vec


def make_store(dim: int, entries: dict[str, list[float]]) -> EmbeddingStore:
    return EmbeddingStore(dim, {k: tuple(v) for k, v in entries.items()})


def preset_task(task_id: str):
    return find_task(load_tasks(default_tasks_path()), task_id)


# ------------------------------------------------------- independent oracles


def reference_parse_store(data: bytes) -> tuple[int, list[tuple[str, list[float]]]]:
    """Struct-only reader for the binary embedding container."""
    assert data[:4] == b"ZSBA"
    version, dim, count = struct.unpack_from("<III", data, 4)
    assert version == 1
    offset = 16
    records = []
    for _ in range(count):
        (key_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        key = data[offset : offset + key_len].decode("utf-8")
        offset += key_len
        values = list(struct.unpack_from(f"<{dim}f", data, offset))
        offset += dim * 4
        records.append((key, values))
    assert offset == len(data)
    return dim, records


def reference_rle_decode(counts: list[int], width: int, height: int) -> list[list[bool]]:
    """Pure-Python RLE decoder."""
    flat: list[bool] = []
    value = False
    for c in counts:
        flat.extend([value] * c)
        value = not value
    assert len(flat) == width * height
    return [flat[r * width : (r + 1) * width] for r in range(height)]


def pixelwise_argmax_oracle(
    width: int,
    height: int,
    mask_grids: list[list[list[bool]]],
    rows: list[list[float]],
) -> list[list[int]]:
    """Brute-force per-pixel label composition.

    For every pixel, gather the score vectors of every covering mask, take
    the best score per category over them, and argmax with lowest-index
    ties. Uncovered pixels get 255.
    """
    out = [[255] * width for _ in range(height)]
    for h in range(height):
        for w in range(width):
            covering = [j for j, grid in enumerate(mask_grids) if grid[h][w]]
            if not covering:
                continue
            n_categories = len(rows[covering[0]])
            best_k = 0
            best_v = None
            for k in range(n_categories):
                v = max(rows[j][k] for j in covering)
                if best_v is None or v > best_v:
                    best_k, best_v = k, v
            out[h][w] = best_k
    return out


def random_nonoverlapping_instance(rng: random.Random, max_hw=8, max_masks=4, max_cats=4):
    """Random mask set + score rows with guaranteed non-overlap."""
    height = rng.randint(1, max_hw)
    width = rng.randint(1, max_hw)
    n_masks = rng.randint(0, max_masks)
    owner = [[rng.randint(-1, n_masks - 1) if n_masks else -1 for _ in range(width)] for _ in range(height)]
    grids = []
    for j in range(n_masks):
        grid = [[owner[h][w] == j for w in range(width)] for h in range(height)]
        if any(any(row) for row in grid):
            grids.append(grid)
    n_categories = rng.randint(1, max_cats)
    rows = [[rng.uniform(-1.0, 1.0) for _ in range(n_categories)] for _ in grids]
    mask_set = MaskSet(
        width=width,
        height=height,
        masks=tuple(
            BinaryMask(f"m{j}", np.array(grid, dtype=bool)) for j, grid in enumerate(grids)
        ),
    )
    return mask_set, grids, rows


# ----------------------------------------------------------- pipeline fixtures


@dataclass
class ClassificationFixture:
    task_id: str
    embeddings_path: Path
    manifest_path: Path
    image_ids: list[str]
    ground_truth: list[int]
    required_keys: list[str]


def build_classification_fixture(root: Path, with_ground_truth: bool = True) -> ClassificationFixture:
    """Six images over the 3-class roof preset; embeddings are one-hot so the
    correct class scores exactly 1 and every other class 0."""
    root.mkdir(parents=True, exist_ok=True)
    task = preset_task("roof_type")
    dim = 4
    entries: dict[str, list[float]] = {}
    required = []
    for cat in task.categories:
        key = text_key(render_prompt(task, cat))
        entries[key] = basis(dim, cat.index)
        required.append(key)
    image_ids = [f"house_{i:03d}" for i in range(6)]
    ground_truth = [0, 1, 2, 0, 1, 2]
    for image_id, truth in zip(image_ids, ground_truth):
        key = image_key(image_id)
        entries[key] = basis(dim, truth)
        required.append(key)
    embeddings_path = root / "embeddings.zsba"
    write_embeddings(make_store(dim, entries), embeddings_path)

    samples = tuple(
        ManifestSample(image_id, ground_truth=truth if with_ground_truth else None)
        for image_id, truth in zip(image_ids, ground_truth)
    )
    manifest_path = root / "manifest.json"
    save_manifest(DatasetManifest(task_id="roof_type", samples=samples), manifest_path)
    return ClassificationFixture(
        task_id="roof_type",
        embeddings_path=embeddings_path,
        manifest_path=manifest_path,
        image_ids=image_ids,
        ground_truth=ground_truth,
        required_keys=required,
    )


@dataclass
class SegmentationFixture:
    task_id: str
    embeddings_path: Path
    manifest_path: Path
    masks_dir: Path
    image_ids: list[str]
    expected_maps: dict[str, np.ndarray]
    required_keys: list[str]


def _band_mask(height: int, width: int, row_lo: int, row_hi: int, col_lo=0, col_hi=None) -> np.ndarray:
    grid = np.zeros((height, width), dtype=bool)
    grid[row_lo:row_hi, col_lo : width if col_hi is None else col_hi] = True
    return grid


def build_segmentation_fixture(root: Path, with_ground_truth: bool = True) -> SegmentationFixture:
    """Two 8x8 images with 3 masks each over the 4-class facade preset.

    Every masked-image embedding is the one-hot vector of its intended
    category, so each mask's label (and therefore the whole map) is known
    in advance. Ground-truth maps are those expected maps.
    """
    root.mkdir(parents=True, exist_ok=True)
    task = preset_task("facade")
    dim = 4
    height = width = 8
    entries: dict[str, list[float]] = {}
    required = []
    for cat in task.categories:
        key = text_key(render_prompt(task, cat))
        entries[key] = basis(dim, cat.index)
        required.append(key)

    layouts = {
        # image -> list of (mask_id, pixel grid, intended category index)
        "img_a": [
            ("m0", _band_mask(height, width, 0, 2), 0),
            ("m1", _band_mask(height, width, 2, 5), 1),
            ("m2", _band_mask(height, width, 5, 7), 2),
        ],
        "img_b": [
            ("m0", _band_mask(height, width, 0, 3), 1),
            ("m1", _band_mask(height, width, 3, 6), 2),
            ("m2", _band_mask(height, width, 6, 8, 0, 4), 3),
        ],
    }

    masks_dir = root / "masks"
    masks_dir.mkdir(exist_ok=True)
    expected_maps: dict[str, np.ndarray] = {}
    samples = []
    for image_id, layout in layouts.items():
        mask_set = MaskSet(
            width=width,
            height=height,
            masks=tuple(BinaryMask(mid, grid) for mid, grid, _ in layout),
        )
        save_masks(mask_set, masks_dir / f"{image_id}.json")
        expected = np.full((height, width), 255, dtype=np.uint8)
        for mask_id, grid, category in layout:
            key = image_key(image_id, mask_id)
            entries[key] = basis(dim, category)
            required.append(key)
            expected[grid] = category
        expected_maps[image_id] = expected
        gt_rel = None
        if with_ground_truth:
            gt_dir = root / "gt"
            gt_dir.mkdir(exist_ok=True)
            write_pgm(expected, gt_dir / f"{image_id}.pgm")
            gt_rel = f"gt/{image_id}.pgm"
        samples.append(ManifestSample(image_id, gt_map_path=gt_rel))

    embeddings_path = root / "embeddings.zsba"
    write_embeddings(make_store(dim, entries), embeddings_path)
    manifest_path = root / "manifest.json"
    save_manifest(DatasetManifest(task_id="facade", samples=tuple(samples)), manifest_path)
    return SegmentationFixture(
        task_id="facade",
        embeddings_path=embeddings_path,
        manifest_path=manifest_path,
        masks_dir=masks_dir,
        image_ids=list(layouts),
        expected_maps=expected_maps,
        required_keys=required,
    )


def drop_store_key(src: Path, key: str, dest: Path) -> None:
    """Rewrite an embedding file without one key (fixture mutation)."""
    from zsba.backend import load_embeddings

    store = load_embeddings(src)
    entries = dict(store.entries)
    del entries[key]
    write_embeddings(EmbeddingStore(store.dimension, entries), dest)


def jsonl_lines(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text().splitlines()]
