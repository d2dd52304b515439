"""Zero-shot building attribute extraction.

Classifies images and labels segmentation masks by matching precomputed
image embeddings against the text embeddings of task vocabularies, and
reports accuracy and IoU the way building-inventory benchmarks do.
"""

from .backend import (
    BinaryMask,
    EmbeddingStore,
    MaskSet,
    image_embedding,
    image_key,
    load_embeddings,
    load_masks,
    rle_decode,
    rle_encode,
    save_masks,
    text_embedding,
    text_key,
    write_embeddings,
)
from .classify import BatchOutcome, ClassificationResult, classify_batch, classify_image
from .core import argmax_index, cosine_sim, l2_normalize, score_against
from .errors import ZsbaError
from .manifest import DatasetManifest, ManifestSample, load_manifest, save_manifest
from .metrics import (
    ClassAccuracy,
    ClassIoU,
    EvalReport,
    classification_report,
    merge_reports,
    report_to_table,
    segmentation_report,
)
from .segment import (
    UNLABELED,
    MaskScores,
    apply_mask,
    compose_segmentation,
    score_masks,
    segment_image,
)
from .vocabulary import (
    CategorySpec,
    TaskSpec,
    default_tasks_path,
    load_tasks,
    render_prompt,
    route_task,
    save_tasks,
)

__version__ = "0.1.0"
