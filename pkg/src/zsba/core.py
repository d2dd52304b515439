"""Embedding algebra: normalization, cosine scores, deterministic argmax.

All arithmetic runs in 64-bit floats with left-to-right accumulation, so
identical inputs give bit-identical results across runs regardless of how
the vectors were stored (the file container keeps float32). Raw cosine
values are used for ranking; no temperature, softmax or calibration is
applied, and ties resolve to the lowest index.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import (
    DimensionMismatchError,
    EmptyScoresError,
    EmptyVocabularyError,
    NonFiniteError,
    ZeroVectorError,
)

Embedding = Sequence[float]
ScoreVector = Sequence[float]


def _check_finite(values: Embedding) -> None:
    for i, v in enumerate(values):
        if not math.isfinite(v):
            raise NonFiniteError(f"non-finite value {v!r} at position {i}")


def _norm(values: Embedding) -> float:
    acc = 0.0
    for v in values:
        acc += float(v) * float(v)
    return math.sqrt(acc)


def l2_normalize(e: Embedding) -> list[float]:
    """Scale ``e`` to unit Euclidean norm, preserving its direction.

    Raises:
        ZeroVectorError: if ``e`` has zero norm.
        NonFiniteError: if ``e`` contains NaN or infinity.
    """
    _check_finite(e)
    norm = _norm(e)
    if norm == 0.0:
        raise ZeroVectorError("cannot normalize a zero vector")
    return [float(v) / norm for v in e]


def cosine_sim(a: Embedding, b: Embedding) -> float:
    """Cosine similarity ``a . b / (|a| |b|)``, clamped into [-1, 1].

    The clamp absorbs last-ulp rounding on near-parallel vectors; everything
    else is the plain dot product over 64-bit floats.

    Raises:
        DimensionMismatchError: if the vectors have different lengths.
        ZeroVectorError: if either vector has zero norm.
        NonFiniteError: if either vector contains NaN or infinity.
    """
    if len(a) != len(b):
        raise DimensionMismatchError(
            f"embedding lengths differ: {len(a)} vs {len(b)}"
        )
    _check_finite(a)
    _check_finite(b)
    norm_a = _norm(a)
    norm_b = _norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVectorError("cosine similarity is undefined for zero vectors")
    acc = 0.0
    for x, y in zip(a, b):
        acc += float(x) * float(y)
    value = acc / (norm_a * norm_b)
    if value > 1.0:
        return 1.0
    if value < -1.0:
        return -1.0
    return value


def score_against(e: Embedding, vocab_embeddings: Sequence[Embedding]) -> list[float]:
    """Score ``e`` against every vocabulary embedding, in vocabulary order.

    Raises:
        EmptyVocabularyError: if ``vocab_embeddings`` is empty.
    """
    if len(vocab_embeddings) == 0:
        raise EmptyVocabularyError("cannot score against an empty vocabulary")
    return [cosine_sim(e, v) for v in vocab_embeddings]


def argmax_index(s: ScoreVector) -> int:
    """Index of the highest score; the lowest index wins on ties."""
    if len(s) == 0:
        raise EmptyScoresError("argmax of an empty score vector")
    _check_finite(s)
    best = 0
    for i in range(1, len(s)):
        if s[i] > s[best]:
            best = i
    return best
