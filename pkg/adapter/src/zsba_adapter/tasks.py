"""Reader for the task-file schema the pipeline consumes.

    {"tasks": [{"task_id": str,
                "task_kind": "classification" | "segmentation",
                "prompt_template": str,   # one "{}" placeholder
                "categories": [str, ...]}]}

The adapter only needs enough of it to render prompts; full invariant
enforcement is the pipeline's job and `zsba validate` will catch anything
this reader lets through.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import TaskFileError

DEFAULT_PROMPT_TEMPLATE = "a photo of {}"


@dataclass(frozen=True)
class Task:
    task_id: str
    task_kind: str
    prompt_template: str
    categories: tuple[str, ...]


def load_tasks(path) -> list[Task]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TaskFileError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("tasks"), list):
        raise TaskFileError(f"{path}: top level must be an object with a 'tasks' list")
    tasks = []
    for pos, entry in enumerate(doc["tasks"]):
        if not isinstance(entry, dict):
            raise TaskFileError(f"{path}: tasks[{pos}] must be an object")
        try:
            task_id = entry["task_id"]
            kind = entry["task_kind"]
            categories = entry["categories"]
        except KeyError as exc:
            raise TaskFileError(f"{path}: tasks[{pos}] is missing {exc}") from exc
        template = entry.get("prompt_template", DEFAULT_PROMPT_TEMPLATE)
        if not all(isinstance(v, str) for v in (task_id, kind, template)):
            raise TaskFileError(f"{path}: tasks[{pos}]: string fields expected")
        if not isinstance(categories, list) or not all(
            isinstance(c, str) and c for c in categories
        ):
            raise TaskFileError(
                f"{path}: tasks[{pos}]: categories must be non-empty strings"
            )
        if template.count("{}") != 1:
            raise TaskFileError(
                f"{path}: tasks[{pos}]: prompt_template needs exactly one '{{}}'"
            )
        tasks.append(Task(task_id, kind, template, tuple(categories)))
    return tasks


def render_prompt(template: str, category: str) -> str:
    return template.replace("{}", category)


def rendered_prompts(tasks: list[Task]) -> list[str]:
    """Every rendered prompt across all tasks, deduplicated, first-seen order."""
    seen: dict[str, None] = {}
    for task in tasks:
        for category in task.categories:
            seen.setdefault(render_prompt(task.prompt_template, category))
    return list(seen)
