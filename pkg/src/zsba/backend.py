"""File-backed encoder outputs: the ZSBA embedding container and RLE mask sets.

The package never runs a neural network. Image and text embeddings are
precomputed by an export adapter and exchanged through two fixed formats.

ZSBA embedding file (binary, little-endian, no padding):

    magic    4 bytes   b"ZSBA"
    version  u32       1
    dim      u32       embedding length L
    count    u32       number of records N
    then N records:    key_len u32, key bytes (UTF-8), L float32 values

Mask file (JSON, UTF-8):

    {"width": W, "height": H, "masks": [{"id": str, "rle": [int, ...]}]}

RLE counts are row-major and alternate zero-runs / one-runs, starting with
a zero-run; only the first count may be zero, and the counts sum to W*H.
Masks within one file never overlap and are never empty (strict mode; the
lenient loader repairs violations instead of rejecting them).

Key schema, shared with the export adapter:

    text::<rendered prompt>
    img::<image_id>                      full image
    img::<image_id>::mask::<mask_id>     image with everything outside the
                                         mask zeroed before encoding
"""

from __future__ import annotations

import json
import logging
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    BadVersionError,
    DuplicateKeyError,
    MissingKeyError,
    NonFiniteError,
    OverlappingMasksError,
    ParseError,
    RleLengthMismatchError,
    TrailingDataError,
    TruncatedFileError,
    ValidationError,
)

logger = logging.getLogger(__name__)

MAGIC = b"ZSBA"
VERSION = 1

TEXT_PREFIX = "text::"
IMAGE_PREFIX = "img::"
MASK_SEPARATOR = "::mask::"


def text_key(prompt: str) -> str:
    return TEXT_PREFIX + prompt


def image_key(image_id: str, mask_id: str | None = None) -> str:
    if mask_id is None:
        return IMAGE_PREFIX + image_id
    return IMAGE_PREFIX + image_id + MASK_SEPARATOR + mask_id


@dataclass(frozen=True)
class EmbeddingStore:
    """Immutable key -> embedding mapping with one shared dimension."""

    dimension: int
    entries: dict[str, tuple[float, ...]]

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def decode_embeddings(data: bytes) -> EmbeddingStore:
    """Parse the binary container from memory."""
    if data[:4] != MAGIC:
        raise BadMagicError(f"expected magic {MAGIC!r}, got {data[:4]!r}")
    if len(data) < 16:
        raise TruncatedFileError("header is shorter than 16 bytes")
    version, dim, count = struct.unpack_from("<III", data, 4)
    if version != VERSION:
        raise BadVersionError(f"unsupported version {version}, expected {VERSION}")
    if dim < 1:
        raise ValidationError("embedding dimension must be at least 1")
    offset = 16
    entries: dict[str, tuple[float, ...]] = {}
    for _ in range(count):
        if offset + 4 > len(data):
            raise TruncatedFileError("record header extends past end of file")
        (key_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        if offset + key_len > len(data):
            raise TruncatedFileError("record key extends past end of file")
        try:
            key = data[offset : offset + key_len].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"record key at offset {offset} is not UTF-8") from exc
        offset += key_len
        if not key:
            raise ValidationError("empty record key")
        if key in entries:
            raise DuplicateKeyError(f"duplicate key {key!r}")
        payload = dim * 4
        if offset + payload > len(data):
            raise TruncatedFileError(f"values of key {key!r} extend past end of file")
        values = np.frombuffer(data, dtype="<f4", count=dim, offset=offset)
        offset += payload
        if not np.all(np.isfinite(values)):
            raise NonFiniteError(f"key {key!r} holds non-finite values")
        entries[key] = tuple(float(v) for v in values)
    if offset != len(data):
        raise TrailingDataError(f"{len(data) - offset} unexpected bytes after last record")
    return EmbeddingStore(dimension=dim, entries=entries)


def encode_embeddings(store: EmbeddingStore) -> bytes:
    """Serialize a store; inverse of decode_embeddings, byte for byte."""
    out = bytearray(MAGIC)
    out += struct.pack("<III", VERSION, store.dimension, len(store.entries))
    for key, values in store.entries.items():
        if not key:
            raise ValidationError("empty record key")
        if len(values) != store.dimension:
            raise ValidationError(
                f"key {key!r} has {len(values)} values, store dimension is "
                f"{store.dimension}"
            )
        arr = np.asarray(values, dtype="<f4")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError(f"key {key!r} does not fit in finite float32")
        encoded = key.encode("utf-8")
        out += struct.pack("<I", len(encoded))
        out += encoded
        out += arr.tobytes()
    return bytes(out)


def load_embeddings(path: str | os.PathLike) -> EmbeddingStore:
    return decode_embeddings(Path(path).read_bytes())


def write_embeddings(store: EmbeddingStore, path: str | os.PathLike) -> None:
    Path(path).write_bytes(encode_embeddings(store))


def text_embedding(store: EmbeddingStore, prompt: str) -> tuple[float, ...]:
    """Exact-match lookup of a rendered prompt's embedding."""
    key = text_key(prompt)
    if key not in store.entries:
        raise MissingKeyError(f"no text embedding exported for prompt {prompt!r}")
    return store.entries[key]


def image_embedding(
    store: EmbeddingStore, image_id: str, mask_id: str | None = None
) -> tuple[float, ...]:
    """Lookup of a full-image or masked-image embedding."""
    key = image_key(image_id, mask_id)
    if key not in store.entries:
        if mask_id is None:
            raise MissingKeyError(f"no embedding exported for image {image_id!r}")
        raise MissingKeyError(
            f"no embedding exported for image {image_id!r} mask {mask_id!r}"
        )
    return store.entries[key]


# ----------------------------------------------------------------- mask sets


@dataclass(frozen=True)
class BinaryMask:
    id: str
    pixels: np.ndarray  # bool, shape (H, W)

    def area(self) -> int:
        return int(self.pixels.sum())


@dataclass(frozen=True)
class MaskSet:
    width: int
    height: int
    masks: tuple[BinaryMask, ...]


def rle_decode(counts: list[int], width: int, height: int) -> np.ndarray:
    """Decode canonical row-major RLE counts into a bool (H, W) array."""
    total = 0
    for i, c in enumerate(counts):
        if not isinstance(c, int) or isinstance(c, bool) or c < 0:
            raise ParseError(f"RLE count at position {i} must be a non-negative integer")
        if c == 0 and i > 0:
            raise ParseError(f"zero-length run at position {i} (only the first may be 0)")
        total += c
    if total != width * height:
        raise RleLengthMismatchError(
            f"RLE counts sum to {total}, expected {width}x{height}={width * height}"
        )
    values = np.arange(len(counts), dtype=np.uint8) & 1
    flat = np.repeat(values, counts)
    return flat.astype(bool).reshape(height, width)


def rle_encode(pixels: np.ndarray) -> list[int]:
    """Encode a bool (H, W) array as canonical row-major RLE counts."""
    flat = np.asarray(pixels, dtype=bool).ravel()
    if flat.size == 0:
        return []
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [flat.size]))
    counts = [int(c) for c in ends - starts]
    if flat[0]:
        counts.insert(0, 0)
    return counts


def _resolve_overlaps(
    height: int, width: int, masks: list[BinaryMask]
) -> list[BinaryMask]:
    """Give contested pixels to the larger mask; lowest index wins area ties."""
    areas = [m.area() for m in masks]
    owner = np.full((height, width), -1, dtype=np.int32)
    # paint in ascending preference so the preferred mask paints last
    for i in sorted(range(len(masks)), key=lambda i: (areas[i], -i)):
        owner[masks[i].pixels] = i
    resolved = []
    for i, mask in enumerate(masks):
        pixels = owner == i
        if not pixels.any():
            logger.warning("mask %r lost all pixels during overlap resolution", mask.id)
            continue
        resolved.append(BinaryMask(mask.id, pixels))
    return resolved


def load_masks(path: str | os.PathLike, strict: bool = True) -> MaskSet:
    """Load a mask file; strict mode rejects overlaps and empty masks."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    width = doc.get("width")
    height = doc.get("height")
    if not isinstance(width, int) or not isinstance(height, int) or width < 1 or height < 1:
        raise ValidationError(f"{path}: width and height must be positive integers")
    raw = doc.get("masks")
    if not isinstance(raw, list):
        raise ParseError(f"{path}: 'masks' must be a list")

    masks: list[BinaryMask] = []
    seen: set[str] = set()
    for pos, entry in enumerate(raw):
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str):
            raise ParseError(f"{path}: masks[{pos}] must be an object with a string 'id'")
        mask_id = entry["id"]
        if not mask_id:
            raise ValidationError(f"{path}: masks[{pos}] has an empty id")
        if mask_id in seen:
            raise ValidationError(f"{path}: duplicate mask id {mask_id!r}")
        seen.add(mask_id)
        counts = entry.get("rle")
        if not isinstance(counts, list):
            raise ParseError(f"{path}: mask {mask_id!r} is missing its 'rle' list")
        try:
            pixels = rle_decode(counts, width, height)
        except (ParseError, RleLengthMismatchError) as exc:
            raise type(exc)(f"{path}: mask {mask_id!r}: {exc}") from exc
        masks.append(BinaryMask(mask_id, pixels))

    empty = [m.id for m in masks if not m.pixels.any()]
    if empty:
        if strict:
            raise ValidationError(f"{path}: masks with no set pixels: {empty}")
        logger.warning("%s: dropping empty masks %s", path, empty)
        masks = [m for m in masks if m.pixels.any()]

    if masks:
        coverage = np.zeros((height, width), dtype=np.int32)
        for mask in masks:
            coverage += mask.pixels
        contested = int((coverage > 1).sum())
        if contested:
            if strict:
                raise OverlappingMasksError(
                    f"{path}: {contested} pixel(s) covered by more than one mask"
                )
            logger.warning(
                "%s: resolving %d contested pixel(s) in favor of larger masks",
                path,
                contested,
            )
            masks = _resolve_overlaps(height, width, masks)

    return MaskSet(width=width, height=height, masks=tuple(masks))


def save_masks(mask_set: MaskSet, path: str | os.PathLike) -> None:
    """Write a mask set in the mask-file format (inverse of load_masks)."""
    doc = {
        "width": mask_set.width,
        "height": mask_set.height,
        "masks": [{"id": m.id, "rle": rle_encode(m.pixels)} for m in mask_set.masks],
    }
    Path(path).write_text(json.dumps(doc) + "\n", encoding="utf-8")
