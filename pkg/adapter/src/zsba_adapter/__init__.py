"""Export adapter: runs encoders and mask generators once, writes the
embedding container, RLE mask files and a metadata sidecar for the zsba
pipeline to consume."""

from .encoders import ClipEncoder, HashEncoder, create_encoder
from .export import ExportJob, ExportSummary, run_export
from .masks import (
    GridMaskGenerator,
    SamMaskGenerator,
    create_mask_generator,
    filter_min_area,
    resolve_overlaps,
)
from .tasks import Task, load_tasks, render_prompt, rendered_prompts

__version__ = "0.1.0"
