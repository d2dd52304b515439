"""Zero-shot semantic segmentation: label masks by similarity, then paint.

Each category-agnostic mask is scored once against every category prompt
(its masked-image embedding vs the text embeddings), and its winning label
is painted onto every pixel it covers. Because masks never overlap, this
per-mask shortcut is exactly the per-pixel argmax over the scores of the
covering mask, at O(masks * categories) instead of O(pixels * categories).

Pixels no mask covers keep the sentinel label 255 ("unlabeled").
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import EmbeddingStore, MaskSet, image_embedding, text_embedding
from .core import argmax_index, score_against
from .errors import (
    DimensionMismatchError,
    OverlappingMasksError,
    RowCountMismatchError,
    TaskKindError,
    ValidationError,
)
from .vocabulary import TaskSpec, render_prompt

UNLABELED = 255


@dataclass(frozen=True)
class MaskScores:
    """One score row per mask, plus each row's winning category index."""

    rows: tuple[tuple[float, ...], ...]
    labels: tuple[int, ...]


def apply_mask(image: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Zero out every pixel outside the mask (element-wise multiplication).

    ``image`` is (H, W, 3); ``mask`` is a bool (H, W) array of the same size.
    """
    image = np.asarray(image)
    mask = np.asarray(mask, dtype=bool)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValidationError(f"expected an (H, W, 3) image, got shape {image.shape}")
    if mask.shape != image.shape[:2]:
        raise DimensionMismatchError(
            f"mask shape {mask.shape} does not match image shape {image.shape[:2]}"
        )
    return image * mask[:, :, None]


def score_masks(
    image_id: str,
    masks: MaskSet,
    task: TaskSpec,
    store: EmbeddingStore,
) -> MaskScores:
    """Score every mask's embedding against every category prompt."""
    if task.task_kind != "segmentation":
        raise TaskKindError(
            f"task {task.task_id!r} is a {task.task_kind} task, expected segmentation"
        )
    vocab = [
        text_embedding(store, render_prompt(task, cat)) for cat in task.categories
    ]
    rows = []
    labels = []
    for mask in masks.masks:
        emb = image_embedding(store, image_id, mask.id)
        row = score_against(emb, vocab)
        rows.append(tuple(row))
        labels.append(argmax_index(row))
    return MaskScores(rows=tuple(rows), labels=tuple(labels))


def compose_segmentation(masks: MaskSet, mask_scores: MaskScores) -> np.ndarray:
    """Paint each mask's winning label; uncovered pixels stay 255.

    Returns a uint8 (H, W) label map.
    """
    if len(mask_scores.rows) != len(masks.masks):
        raise RowCountMismatchError(
            f"{len(mask_scores.rows)} score rows for {len(masks.masks)} masks"
        )
    labels = np.full((masks.height, masks.width), UNLABELED, dtype=np.uint8)
    coverage = np.zeros((masks.height, masks.width), dtype=np.int32)
    for mask, row in zip(masks.masks, mask_scores.rows):
        winner = argmax_index(row)
        if winner >= UNLABELED:
            raise ValidationError(
                f"category index {winner} collides with the unlabeled sentinel"
            )
        labels[mask.pixels] = winner
        coverage += mask.pixels
    contested = int((coverage > 1).sum())
    if contested:
        raise OverlappingMasksError(
            f"{contested} pixel(s) covered by more than one mask"
        )
    return labels


def segment_image(
    image_id: str,
    masks: MaskSet,
    task: TaskSpec,
    store: EmbeddingStore,
) -> np.ndarray:
    """End-to-end segmentation of one image's mask set. Deterministic."""
    return compose_segmentation(masks, score_masks(image_id, masks, task, store))
