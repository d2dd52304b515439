"""Mask sources and the postprocessing that makes their output exchangeable.

Automatic mask generators do not guarantee disjoint masks, but the
pipeline's strict loader rejects any overlap. resolve_overlaps gives every
contested pixel to the smallest claiming mask (finer structure wins, e.g. a
window nested in a facade keeps its pixels) and drops masks that end up
empty. The grid source is a deterministic stand-in that needs no model.
"""

from __future__ import annotations

import numpy as np

from .errors import ModelUnavailableError

DEFAULT_SAM_MODEL = "facebook/sam-vit-base"


class GridMaskGenerator:
    """Regular block partition of the frame; disjoint by construction."""

    def __init__(self, rows: int = 3, cols: int = 3):
        self.name = f"grid-{rows}x{cols}"
        self.rows = rows
        self.cols = cols

    def generate(self, rgb: np.ndarray) -> list[np.ndarray]:
        height, width = rgb.shape[:2]
        row_edges = np.linspace(0, height, self.rows + 1, dtype=int)
        col_edges = np.linspace(0, width, self.cols + 1, dtype=int)
        masks = []
        for r in range(self.rows):
            for c in range(self.cols):
                mask = np.zeros((height, width), dtype=bool)
                mask[row_edges[r] : row_edges[r + 1], col_edges[c] : col_edges[c + 1]] = True
                if mask.any():
                    masks.append(mask)
        return masks


class SamMaskGenerator:
    """Automatic mask generation via a transformers pipeline; loads lazily."""

    def __init__(self, model_name: str = DEFAULT_SAM_MODEL, device: str = "cpu"):
        self.name = model_name
        self.device = device
        self._pipeline = None

    def _ensure(self):
        if self._pipeline is not None:
            return
        try:
            from transformers import pipeline
        except ImportError as exc:
            raise ModelUnavailableError(
                "install the [models] extra to use a real mask generator"
            ) from exc
        try:
            self._pipeline = pipeline(
                "mask-generation", model=self.name, device=self.device
            )
        except Exception as exc:
            raise ModelUnavailableError(f"could not load {self.name!r}: {exc}") from exc

    def generate(self, rgb: np.ndarray) -> list[np.ndarray]:
        self._ensure()
        from PIL import Image

        image = Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8))
        output = self._pipeline(image)
        return [np.asarray(m, dtype=bool) for m in output["masks"]]


def filter_min_area(masks: list[np.ndarray], min_area: int) -> list[np.ndarray]:
    if min_area <= 0:
        return list(masks)
    return [m for m in masks if int(m.sum()) >= min_area]


def resolve_overlaps(masks: list[np.ndarray]) -> list[np.ndarray]:
    """Disjoint masks out: contested pixels go to the smallest claimant
    (ties to the earlier mask); masks left without pixels are dropped."""
    if not masks:
        return []
    areas = [int(m.sum()) for m in masks]
    owner = np.full(masks[0].shape, -1, dtype=np.int32)
    # paint in ascending preference: big masks first, small masks overwrite
    for i in sorted(range(len(masks)), key=lambda i: (-areas[i], -i)):
        owner[masks[i]] = i
    resolved = []
    for i in range(len(masks)):
        pixels = owner == i
        if pixels.any():
            resolved.append(pixels)
    return resolved


def create_mask_generator(name: str, grid_rows: int = 3, grid_cols: int = 3):
    if name == "grid":
        return GridMaskGenerator(rows=grid_rows, cols=grid_cols)
    return SamMaskGenerator(model_name=name)
