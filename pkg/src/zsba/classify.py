"""Zero-shot image classification against a task vocabulary.

An image is labeled by scoring its embedding against the text embedding of
every rendered category prompt and taking the best match. Batch runs
isolate per-sample failures so one broken fixture cannot sink a dataset
sweep; failures are collected next to the results instead of raised.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .backend import EmbeddingStore, image_embedding, text_embedding
from .core import Embedding, argmax_index, score_against
from .errors import TaskKindError, ZsbaError
from .manifest import DatasetManifest
from .vocabulary import TaskSpec, render_prompt


@dataclass(frozen=True)
class ClassificationResult:
    image_id: str
    task_id: str
    predicted_index: int
    predicted_name: str
    scores: tuple[float, ...]


@dataclass(frozen=True)
class SampleFailure:
    image_id: str
    error: str


@dataclass
class BatchOutcome:
    """Results in manifest order plus the samples that could not be scored."""

    results: list[ClassificationResult]
    failures: list[SampleFailure]


def classify_image(
    image_emb: Embedding,
    task: TaskSpec,
    store: EmbeddingStore,
    image_id: str = "",
) -> ClassificationResult:
    """Score one image embedding against every category of a classification task."""
    if task.task_kind != "classification":
        raise TaskKindError(
            f"task {task.task_id!r} is a {task.task_kind} task, expected classification"
        )
    vocab = [
        text_embedding(store, render_prompt(task, cat)) for cat in task.categories
    ]
    scores = score_against(image_emb, vocab)
    index = argmax_index(scores)
    return ClassificationResult(
        image_id=image_id,
        task_id=task.task_id,
        predicted_index=index,
        predicted_name=task.categories[index].name,
        scores=tuple(scores),
    )


def classify_batch(
    manifest: DatasetManifest,
    task: TaskSpec,
    store: EmbeddingStore,
    workers: int = 1,
) -> BatchOutcome:
    """Classify every manifest sample; per-sample errors are recorded, not raised.

    Output order always matches manifest order, whatever the worker count.
    """

    def run_one(sample):
        try:
            emb = image_embedding(store, sample.image_id)
            return classify_image(emb, task, store, image_id=sample.image_id), None
        except ZsbaError as exc:
            return None, SampleFailure(sample.image_id, f"{type(exc).__name__}: {exc}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(run_one, manifest.samples))
    else:
        pairs = [run_one(s) for s in manifest.samples]

    outcome = BatchOutcome(results=[], failures=[])
    for result, failure in pairs:
        if result is not None:
            outcome.results.append(result)
        else:
            outcome.failures.append(failure)
    return outcome
