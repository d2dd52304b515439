"""Test utilities: synthetic photographs and an independent container parser."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw


def make_photo(path: Path, seed: int, size=(128, 96)) -> None:
    """A small house-like JPEG: sky gradient, facade, roof, window, noise."""
    width, height = size
    rng = np.random.default_rng(seed)
    y = np.linspace(0.0, 1.0, height)[:, None]
    sky = np.stack(
        [
            90 + 60 * y + rng.normal(0, 4, (height, 1)),
            140 + 50 * y + rng.normal(0, 4, (height, 1)),
            200 + 30 * y + rng.normal(0, 4, (height, 1)),
        ],
        axis=-1,
    )
    base = np.clip(np.broadcast_to(sky, (height, width, 3)), 0, 255).astype(np.uint8)
    img = Image.fromarray(base)
    draw = ImageDraw.Draw(img)
    left, top = width // 4, height // 2
    right, bottom = 3 * width // 4, height - 4
    draw.rectangle([left, top, right, bottom], fill=(188, 158, 120))
    draw.polygon(
        [(left - 8, top), (right + 8, top), ((left + right) // 2, top - height // 4)],
        fill=(120, 60, 50),
    )
    draw.rectangle(
        [left + 8, top + 10, left + 24, top + 26], fill=(70, 90, 110)
    )
    noisy = np.asarray(img).astype(np.int16) + rng.integers(-6, 7, (height, width, 3))
    Image.fromarray(np.clip(noisy, 0, 255).astype(np.uint8)).save(path, quality=92)


def parse_container(data: bytes) -> tuple[int, dict[str, bytes]]:
    """Independent reader returning raw float32 payload bytes per key."""
    assert data[:4] == b"ZSBA"
    version, dim, count = struct.unpack_from("<III", data, 4)
    assert version == 1
    offset = 16
    records: dict[str, bytes] = {}
    for _ in range(count):
        (key_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        key = data[offset : offset + key_len].decode("utf-8")
        offset += key_len
        records[key] = data[offset : offset + dim * 4]
        offset += dim * 4
    assert offset == len(data)
    return dim, records
