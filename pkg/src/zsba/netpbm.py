"""Minimal netpbm IO: binary PGM (P5) label maps and PPM (P6) color overlays.

Both formats are written with maxval 255 and one byte per sample, row-major,
which keeps outputs bit-exact and diffable. The overlay palette is fixed:
category index i maps to PALETTE[i % len(PALETTE)], and the unlabeled
sentinel (255) is black.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .errors import ParseError

MAXVAL = 255

PALETTE = (
    (230, 25, 75),    # red
    (60, 180, 75),    # green
    (255, 225, 25),   # yellow
    (0, 130, 200),    # blue
    (245, 130, 48),   # orange
    (145, 30, 180),   # purple
    (70, 240, 240),   # cyan
    (240, 50, 230),   # magenta
    (210, 245, 60),   # lime
    (250, 190, 212),  # pink
    (0, 128, 128),    # teal
    (220, 190, 255),  # lavender
    (170, 110, 40),   # brown
    (255, 250, 200),  # beige
    (128, 0, 0),      # maroon
    (170, 255, 195),  # mint
)
UNLABELED_RGB = (0, 0, 0)


def write_pgm(labels: np.ndarray, path: str | os.PathLike) -> None:
    arr = np.ascontiguousarray(labels, dtype=np.uint8)
    if arr.ndim != 2:
        raise ParseError(f"PGM wants a 2-d array, got shape {arr.shape}")
    height, width = arr.shape
    header = f"P5\n{width} {height}\n{MAXVAL}\n".encode("ascii")
    Path(path).write_bytes(header + arr.tobytes())


def write_ppm(rgb: np.ndarray, path: str | os.PathLike) -> None:
    arr = np.ascontiguousarray(rgb, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ParseError(f"PPM wants an (H, W, 3) array, got shape {arr.shape}")
    height, width = arr.shape[:2]
    header = f"P6\n{width} {height}\n{MAXVAL}\n".encode("ascii")
    Path(path).write_bytes(header + arr.tobytes())


def _read_header(data: bytes, path, magic: bytes) -> tuple[int, int, int]:
    """Parse '<magic> W H maxval' allowing whitespace and # comments; return (W, H, raster offset)."""
    if data[:2] != magic:
        raise ParseError(f"{path}: expected {magic.decode()} file, got {data[:2]!r}")
    fields: list[int] = []
    i = 2
    while len(fields) < 3:
        if i >= len(data):
            raise ParseError(f"{path}: truncated header")
        c = data[i]
        if c == ord("#"):
            while i < len(data) and data[i] != ord("\n"):
                i += 1
        elif c in b" \t\r\n":
            i += 1
        elif ord("0") <= c <= ord("9"):
            j = i
            while j < len(data) and ord("0") <= data[j] <= ord("9"):
                j += 1
            fields.append(int(data[i:j]))
            i = j
        else:
            raise ParseError(f"{path}: unexpected byte {data[i:i + 1]!r} in header")
    if i >= len(data) or data[i] not in b" \t\r\n":
        raise ParseError(f"{path}: missing whitespace before raster")
    width, height, maxval = fields
    if maxval != MAXVAL:
        raise ParseError(f"{path}: only maxval {MAXVAL} is supported, got {maxval}")
    if width < 1 or height < 1:
        raise ParseError(f"{path}: bad dimensions {width}x{height}")
    return width, height, i + 1


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    data = Path(path).read_bytes()
    width, height, offset = _read_header(data, path, b"P5")
    raster = data[offset : offset + width * height]
    if len(raster) != width * height:
        raise ParseError(f"{path}: raster shorter than {width}x{height}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def read_ppm(path: str | os.PathLike) -> np.ndarray:
    data = Path(path).read_bytes()
    width, height, offset = _read_header(data, path, b"P6")
    raster = data[offset : offset + width * height * 3]
    if len(raster) != width * height * 3:
        raise ParseError(f"{path}: raster shorter than {width}x{height}x3")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)


def colorize(labels: np.ndarray) -> np.ndarray:
    """Map a label map to RGB through the fixed palette; 255 stays black."""
    lut = np.zeros((256, 3), dtype=np.uint8)
    for i in range(255):
        lut[i] = PALETTE[i % len(PALETTE)]
    lut[255] = UNLABELED_RGB
    return lut[np.asarray(labels, dtype=np.uint8)]
