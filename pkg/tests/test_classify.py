import math
import random

import pytest

from helpers import basis, make_store, preset_task
from zsba.backend import image_key, text_key
from zsba.classify import classify_batch, classify_image
from zsba.errors import TaskKindError
from zsba.manifest import DatasetManifest, ManifestSample
from zsba.vocabulary import CategorySpec, TaskSpec, render_prompt


def roof_store(dim=4, images=None):
    task = preset_task("roof_type")
    entries = {
        text_key(render_prompt(task, cat)): basis(dim, cat.index)
        for cat in task.categories
    }
    entries.update(images or {})
    return task, make_store(dim, entries)


class TestClassifyImage:
    def test_self_match(self):
        task, store = roof_store()
        hipped = basis(4, 1)
        result = classify_image(hipped, task, store, image_id="x")
        assert result.predicted_name == "hipped"
        assert result.predicted_index == 1
        assert result.scores[1] == 1.0

    def test_tie_breaks_to_lowest_index(self):
        # gabled=[1,0], hipped=[0,1], flat=[-1,0]; the image sits on the diagonal
        task = TaskSpec(
            "roof3",
            "classification",
            "{}",
            (CategorySpec("gabled", 0), CategorySpec("hipped", 1), CategorySpec("flat", 2)),
        )
        store = make_store(
            2,
            {
                text_key("gabled"): [1.0, 0.0],
                text_key("hipped"): [0.0, 1.0],
                text_key("flat"): [-1.0, 0.0],
            },
        )
        inv = 1.0 / math.sqrt(2.0)
        result = classify_image([inv, inv], task, store)
        assert result.scores == pytest.approx([inv, inv, -inv], abs=1e-6)
        assert result.predicted_name == "gabled"

    def test_wrong_task_kind(self):
        task = preset_task("facade")
        _, store = roof_store()
        with pytest.raises(TaskKindError):
            classify_image([1.0, 0.0, 0.0, 0.0], task, store)

    def test_result_invariants(self):
        task, store = roof_store()
        result = classify_image([0.3, 0.9, 0.1, 0.0], task, store)
        assert 0 <= result.predicted_index < len(task.categories)
        assert result.predicted_name == task.categories[result.predicted_index].name
        assert len(result.scores) == len(task.categories)

    def test_prediction_stable_under_positive_rescaling(self):
        task, store = roof_store()
        emb = [0.3, 0.8, 0.51, 0.0]
        base = classify_image(emb, task, store)
        scaled = classify_image([7.5 * v for v in emb], task, store)
        assert scaled.predicted_index == base.predicted_index

    def test_category_permutation_permutes_scores(self):
        task, store = roof_store()
        emb = [0.9, 0.5, 0.1, 0.0]  # distinct scores, no tie ambiguity
        base = classify_image(emb, task, store)

        # same vocabulary listed in reverse
        permuted_task = TaskSpec(
            task.task_id,
            task.task_kind,
            task.prompt_template,
            tuple(
                CategorySpec(cat.name, i)
                for i, cat in enumerate(reversed(task.categories))
            ),
        )
        permuted = classify_image(emb, permuted_task, store)
        assert list(permuted.scores) == list(reversed(base.scores))
        assert permuted.predicted_name == base.predicted_name


class TestClassifyBatch:
    def manifest(self, ids):
        return DatasetManifest(
            task_id="roof_type", samples=tuple(ManifestSample(i) for i in ids)
        )

    def test_results_in_manifest_order(self):
        task, store = roof_store(
            images={
                image_key("c"): basis(4, 2),
                image_key("a"): basis(4, 0),
                image_key("b"): basis(4, 1),
            }
        )
        outcome = classify_batch(self.manifest(["c", "a", "b"]), task, store)
        assert [r.image_id for r in outcome.results] == ["c", "a", "b"]
        assert [r.predicted_index for r in outcome.results] == [2, 0, 1]
        assert outcome.failures == []

    def test_missing_embedding_is_isolated(self):
        task, store = roof_store(
            images={image_key("a"): basis(4, 0), image_key("c"): basis(4, 2)}
        )
        outcome = classify_batch(self.manifest(["a", "b", "c"]), task, store)
        assert [r.image_id for r in outcome.results] == ["a", "c"]
        assert len(outcome.failures) == 1
        assert outcome.failures[0].image_id == "b"
        assert "MissingKey" in outcome.failures[0].error

    def test_empty_manifest(self):
        task, store = roof_store()
        outcome = classify_batch(self.manifest([]), task, store)
        assert outcome.results == []
        assert outcome.failures == []

    def test_partitioning_independence(self):
        rng = random.Random(11)
        ids = [f"img{i}" for i in range(12)]
        images = {
            image_key(i): [rng.uniform(-1, 1) for _ in range(4)] for i in ids
        }
        task, store = roof_store(images=images)

        whole = classify_batch(self.manifest(ids), task, store)
        pieces = []
        for chunk in (ids[:5], ids[5:8], ids[8:]):
            pieces.extend(classify_batch(self.manifest(chunk), task, store).results)
        singles = [
            classify_image(images[image_key(i)], task, store, image_id=i) for i in ids
        ]
        assert whole.results == pieces == singles

    def test_worker_count_does_not_change_results(self):
        rng = random.Random(5)
        ids = [f"img{i}" for i in range(20)]
        images = {
            image_key(i): [rng.uniform(-1, 1) for _ in range(4)] for i in ids
        }
        task, store = roof_store(images=images)
        one = classify_batch(self.manifest(ids), task, store, workers=1)
        four = classify_batch(self.manifest(ids), task, store, workers=4)
        assert one.results == four.results
        assert one.failures == four.failures
