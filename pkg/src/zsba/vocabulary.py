"""Task vocabularies: named category lists plus a prompt template.

A task file is a UTF-8 JSON document:

    {"tasks": [{"task_id": str,
                "task_kind": "classification" | "segmentation",
                "prompt_template": str,   # exactly one "{}" placeholder
                "categories": [str, ...]}]}

Category order is significant: score vectors, prediction indices and
segmentation labels all index into it. Presets for the stock building
tasks ship with the package; the ZSBA_DATA_DIR environment variable points
lookups at an alternative directory.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ParseError, ValidationError

TASK_KINDS = ("classification", "segmentation")
DEFAULT_PROMPT_TEMPLATE = "a photo of {}"
PLACEHOLDER = "{}"

# segmentation labels are stored in one byte, with 255 reserved for
# "no mask covered this pixel"
MAX_SEGMENTATION_CATEGORIES = 255


@dataclass(frozen=True)
class CategorySpec:
    name: str
    index: int


@dataclass(frozen=True)
class TaskSpec:
    task_id: str
    task_kind: str
    prompt_template: str
    categories: tuple[CategorySpec, ...]

    def category_names(self) -> list[str]:
        return [c.name for c in self.categories]


def validate_task(task: TaskSpec) -> None:
    """Check every TaskSpec invariant; raise ValidationError naming the first violation."""
    if not task.task_id:
        raise ValidationError("task_id must be non-empty")
    if task.task_kind not in TASK_KINDS:
        raise ValidationError(
            f"task {task.task_id!r}: task_kind must be one of {TASK_KINDS}, "
            f"got {task.task_kind!r}"
        )
    if task.prompt_template.count(PLACEHOLDER) != 1:
        raise ValidationError(
            f"task {task.task_id!r}: prompt_template must contain exactly one "
            f"'{{}}' placeholder, got {task.prompt_template!r}"
        )
    minimum = 2 if task.task_kind == "classification" else 1
    if len(task.categories) < minimum:
        raise ValidationError(
            f"task {task.task_id!r}: {task.task_kind} tasks need at least "
            f"{minimum} categories, got {len(task.categories)}"
        )
    if (
        task.task_kind == "segmentation"
        and len(task.categories) > MAX_SEGMENTATION_CATEGORIES
    ):
        raise ValidationError(
            f"task {task.task_id!r}: segmentation tasks support at most "
            f"{MAX_SEGMENTATION_CATEGORIES} categories"
        )
    seen: set[str] = set()
    for pos, cat in enumerate(task.categories):
        if cat.index != pos:
            raise ValidationError(
                f"task {task.task_id!r}: category {cat.name!r} has index "
                f"{cat.index}, expected {pos}"
            )
        if not cat.name:
            raise ValidationError(f"task {task.task_id!r}: empty category name")
        if PLACEHOLDER in cat.name:
            raise ValidationError(
                f"task {task.task_id!r}: category name {cat.name!r} may not "
                f"contain the '{{}}' placeholder"
            )
        if cat.name in seen:
            raise ValidationError(
                f"task {task.task_id!r}: duplicate category name {cat.name!r}"
            )
        seen.add(cat.name)


def _task_from_dict(entry: object, pos: int) -> TaskSpec:
    where = f"tasks[{pos}]"
    if not isinstance(entry, dict):
        raise ParseError(f"{where}: expected an object")
    for field in ("task_id", "task_kind", "categories"):
        if field not in entry:
            raise ParseError(f"{where}: missing field {field!r}")
    task_id = entry["task_id"]
    task_kind = entry["task_kind"]
    template = entry.get("prompt_template", DEFAULT_PROMPT_TEMPLATE)
    names = entry["categories"]
    if not isinstance(task_id, str) or not isinstance(task_kind, str):
        raise ParseError(f"{where}: task_id and task_kind must be strings")
    if not isinstance(template, str):
        raise ParseError(f"{where}: prompt_template must be a string")
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise ParseError(f"{where}: categories must be a list of strings")
    return TaskSpec(
        task_id=task_id,
        task_kind=task_kind,
        prompt_template=template,
        categories=tuple(CategorySpec(name, i) for i, name in enumerate(names)),
    )


def load_tasks(path: str | os.PathLike) -> list[TaskSpec]:
    """Load and validate every task in a task file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("tasks"), list):
        raise ParseError(f"{path}: top level must be an object with a 'tasks' list")
    tasks = [_task_from_dict(entry, i) for i, entry in enumerate(doc["tasks"])]
    ids: set[str] = set()
    for task in tasks:
        validate_task(task)
        if task.task_id in ids:
            raise ValidationError(f"duplicate task_id {task.task_id!r}")
        ids.add(task.task_id)
    return tasks


def save_tasks(tasks: list[TaskSpec], path: str | os.PathLike) -> None:
    """Serialize tasks back to the task-file format (inverse of load_tasks)."""
    doc = {
        "tasks": [
            {
                "task_id": t.task_id,
                "task_kind": t.task_kind,
                "prompt_template": t.prompt_template,
                "categories": t.category_names(),
            }
            for t in tasks
        ]
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def render_prompt(task: TaskSpec, category: CategorySpec) -> str:
    """Substitute the category name into the task's prompt template."""
    if category.index >= len(task.categories) or task.categories[category.index] != category:
        raise ValidationError(
            f"category {category.name!r} does not belong to task {task.task_id!r}"
        )
    return task.prompt_template.replace(PLACEHOLDER, category.name)


def route_task(task: TaskSpec) -> str:
    """Which pipeline the task runs through: 'classification' or 'segmentation'."""
    if task.task_kind not in TASK_KINDS:
        raise ValidationError(f"unknown task kind {task.task_kind!r}")
    return task.task_kind


def default_tasks_path() -> Path:
    """The shipped preset task file, unless ZSBA_DATA_DIR points elsewhere."""
    override = os.environ.get("ZSBA_DATA_DIR")
    if override:
        return Path(override) / "tasks.json"
    return Path(str(resources.files("zsba").joinpath("presets/tasks.json")))


def find_task(tasks: list[TaskSpec], task_id: str) -> TaskSpec | None:
    for task in tasks:
        if task.task_id == task_id:
            return task
    return None
