"""Fit orchestration and versioned model document round trips."""

import json

import numpy as np
import pytest

from slproto.config import SlpConfig
from slproto.data import gen_synthetic
from slproto.errors import BudgetExceededError, DataError
from slproto.pipeline import (
    MODEL_SCHEMA,
    doc_to_model,
    fit_model,
    load_model,
    model_to_doc,
    save_model,
)
from slproto.vectors import EmbeddingVector

COLLINEAR_SPECS = [
    {"label": "a", "mean": [0.0, 0.0], "sigma": 0.05, "count": 20},
    {"label": "b", "mean": [1.0, 0.0], "sigma": 0.05, "count": 20},
    {"label": "c", "mean": [2.0, 0.0], "sigma": 0.05, "count": 20},
]


def collinear_support(seed=5):
    return gen_synthetic(COLLINEAR_SPECS, seed=seed).instances


class TestFitModel:
    def test_three_collinear_classes_give_two_prototypes(self):
        model = fit_model(collinear_support())
        assert model.m == 2
        assert model.n == 3
        timings = model.metadata["timings_ms"]
        assert timings["line_construction"] >= 0.0
        assert timings["prototype_generation"] >= 0.0
        assert model.metadata["line_score"] == 0.0

    def test_single_class_support(self):
        support = [
            EmbeddingVector(f"s{i}", "solo", np.array([4.0, 4.0]) + i * 0.01)
            for i in range(3)
        ]
        model = fit_model(support)
        assert model.m == 1
        np.testing.assert_allclose(model.prototypes[0].soft_label, [1.0])

    def test_brute_algorithm_path(self):
        model = fit_model(collinear_support(), SlpConfig(algo="brute", lines=1))
        assert model.m == 2
        assert model.metadata["hyperparameters"]["algo"] == "brute"

    def test_brute_budget_guard_propagates(self):
        rng = np.random.default_rng(9)
        support = [
            EmbeddingVector(f"i{i}", f"c{i}", rng.normal(size=2) + i * 3.0)
            for i in range(12)
        ]
        with pytest.raises(BudgetExceededError) as err:
            fit_model(support, SlpConfig(algo="brute"))
        assert "12" in str(err.value)


class TestModelDocuments:
    def test_round_trip_is_bit_identical(self, tmp_path):
        model = fit_model(collinear_support())
        path = str(tmp_path / "model.json")
        save_model(model, path)
        back = load_model(path)
        assert back.class_order == model.class_order
        assert back.m == model.m
        for p1, p2 in zip(model.prototypes, back.prototypes):
            assert p1.location.tobytes() == p2.location.tobytes()
            assert p1.soft_label.tobytes() == p2.soft_label.tobytes()
            assert p1.line_index == p2.line_index
        assert back.metadata["lines"][0]["margin"] == model.metadata["lines"][0]["margin"]

    def test_schema_mismatch_rejected(self):
        doc = model_to_doc(fit_model(collinear_support()))
        doc["schema"] = "slproto-model/999"
        with pytest.raises(DataError, match="schema"):
            doc_to_model(doc)
        assert MODEL_SCHEMA == "slproto-model/1"

    def test_corrupted_file_rejected(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ not json")
        with pytest.raises(DataError, match="JSON"):
            load_model(str(path))

    def test_invalid_distribution_rejected(self):
        doc = model_to_doc(fit_model(collinear_support()))
        doc["prototypes"][0]["soft_label"] = [0.5, 0.1, 0.1]
        with pytest.raises(DataError, match="distribution"):
            doc_to_model(doc)

    def test_wrong_label_width_rejected(self):
        doc = model_to_doc(fit_model(collinear_support()))
        doc["prototypes"][0]["soft_label"] = [1.0]
        with pytest.raises(DataError, match="entries"):
            doc_to_model(doc)

    def test_document_is_plain_json(self):
        doc = model_to_doc(fit_model(collinear_support()))
        parsed = json.loads(json.dumps(doc))
        assert parsed["schema"] == MODEL_SCHEMA
        assert len(parsed["prototypes"]) == 2
