"""Writers for the two interchange formats the pipeline reads.

This is an independent implementation of the documented formats (not a
reuse of the pipeline's own code); the contract tests feed its output to
`zsba validate` to prove the two ends agree byte for byte.

Embedding container: magic b"ZSBA", version u32 = 1, dimension u32,
count u32, then per record key_len u32 + UTF-8 key + dimension float32
values. All little-endian, no padding.

Mask file: {"width", "height", "masks": [{"id", "rle"}]} with row-major
counts alternating zero-runs / one-runs, first run a (possibly empty)
zero-run, summing to width * height.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ExportError

TEXT_PREFIX = "text::"
IMAGE_PREFIX = "img::"
MASK_SEPARATOR = "::mask::"


def text_key(prompt: str) -> str:
    return TEXT_PREFIX + prompt


def image_key(image_id: str, mask_id: str | None = None) -> str:
    if mask_id is None:
        return IMAGE_PREFIX + image_id
    return IMAGE_PREFIX + image_id + MASK_SEPARATOR + mask_id


def encode_embedding_file(dim: int, records: Iterable[tuple[str, np.ndarray]]) -> bytes:
    records = list(records)
    out = bytearray(b"ZSBA")
    out += struct.pack("<III", 1, dim, len(records))
    seen: set[str] = set()
    for key, values in records:
        if key in seen:
            raise ExportError(f"duplicate embedding key {key!r}")
        seen.add(key)
        arr = np.asarray(values, dtype="<f4").ravel()
        if arr.shape != (dim,):
            raise ExportError(
                f"key {key!r}: {arr.shape[0]} values, expected dimension {dim}"
            )
        encoded = key.encode("utf-8")
        out += struct.pack("<I", len(encoded))
        out += encoded
        out += arr.tobytes()
    return bytes(out)


def write_embedding_file(path, dim: int, records: Iterable[tuple[str, np.ndarray]]) -> None:
    Path(path).write_bytes(encode_embedding_file(dim, records))


def mask_to_rle(pixels: np.ndarray) -> list[int]:
    flat = np.asarray(pixels, dtype=bool).ravel()
    if flat.size == 0:
        return []
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    edges = np.concatenate(([0], change, [flat.size]))
    counts = [int(c) for c in np.diff(edges)]
    if flat[0]:
        counts.insert(0, 0)
    return counts


def write_mask_file(path, width: int, height: int, masks: list[tuple[str, np.ndarray]]) -> None:
    doc = {
        "width": width,
        "height": height,
        "masks": [{"id": mask_id, "rle": mask_to_rle(pixels)} for mask_id, pixels in masks],
    }
    Path(path).write_text(json.dumps(doc) + "\n", encoding="utf-8")
