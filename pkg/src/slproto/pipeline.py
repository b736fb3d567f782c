"""End-to-end model fitting and versioned model document I/O."""

from __future__ import annotations

import json
import time

import numpy as np

from .config import SlpConfig
from .data import atomic_write_text
from .errors import DataError
from .linefit import LineSet, brute_force_lines, recursive_regression_lines
from .prototypes import PrototypeModel, SoftLabelPrototype, generate_prototype_model
from .vectors import CentroidSet, EmbeddingVector, compute_centroids

MODEL_SCHEMA = "slproto-model/1"


def build_lineset(centroids: CentroidSet, config: SlpConfig) -> LineSet:
    """Run the configured line-construction algorithm; a single class
    yields the empty line set (its prototype is the bare centroid)."""
    if centroids.n < 2:
        return LineSet(
            lines=[],
            assignment={},
            score=0.0,
            uncovered=list(centroids.classes),
            epsilon=config.epsilon,
        )
    l = config.line_budget(centroids.n)
    if config.algo == "brute":
        return brute_force_lines(
            centroids, l, budget=config.budget, epsilon=config.epsilon
        )
    return recursive_regression_lines(centroids, l, config.epsilon)


def fit_model(support: list[EmbeddingVector], config: SlpConfig | None = None) -> PrototypeModel:
    """Centroids -> lines -> endpoint prototypes, with phase timings."""
    config = config if config is not None else SlpConfig()
    config.validate()
    start = time.perf_counter_ns()
    centroids = compute_centroids(support)
    lineset = build_lineset(centroids, config)
    line_ms = (time.perf_counter_ns() - start) / 1e6
    model = generate_prototype_model(centroids, lineset, config)
    model.metadata["timings_ms"]["line_construction"] = line_ms
    model.metadata["line_score"] = lineset.score
    return model


def model_to_doc(model: PrototypeModel) -> dict:
    """Plain-JSON document for a fitted model (schema-versioned)."""
    return {
        "schema": MODEL_SCHEMA,
        "class_order": list(model.class_order),
        "prototypes": [
            {
                "location": p.location.tolist(),
                "soft_label": p.soft_label.tolist(),
                "line_index": p.line_index,
            }
            for p in model.prototypes
        ],
        "metadata": model.metadata,
    }


def doc_to_model(doc: dict) -> PrototypeModel:
    if not isinstance(doc, dict):
        raise DataError("model document must be a JSON object")
    schema = doc.get("schema")
    if schema != MODEL_SCHEMA:
        raise DataError(
            f"model schema mismatch: file has {schema!r}, this build reads {MODEL_SCHEMA!r}"
        )
    class_order = doc.get("class_order")
    raw_protos = doc.get("prototypes")
    if not isinstance(class_order, list) or not all(isinstance(c, str) for c in class_order):
        raise DataError("model class_order must be a list of class ids")
    if not isinstance(raw_protos, list) or not raw_protos:
        raise DataError("model needs at least one prototype")
    n = len(class_order)
    prototypes = []
    for i, raw in enumerate(raw_protos):
        try:
            location = np.asarray(raw["location"], dtype=np.float64)
            soft_label = np.asarray(raw["soft_label"], dtype=np.float64)
            line_index = raw.get("line_index")
        except (TypeError, KeyError) as exc:
            raise DataError(f"prototype {i} is malformed: {exc}") from exc
        if soft_label.shape != (n,):
            raise DataError(
                f"prototype {i} soft label has {soft_label.shape[0]} entries, expected {n}"
            )
        if location.ndim != 1 or not np.all(np.isfinite(location)):
            raise DataError(f"prototype {i} location must be a flat finite vector")
        if np.any(soft_label < 0) or abs(float(soft_label.sum()) - 1.0) > 1e-7:
            raise DataError(f"prototype {i} soft label is not a distribution")
        prototypes.append(
            SoftLabelPrototype(location=location, soft_label=soft_label, line_index=line_index)
        )
    dims = {p.location.shape[0] for p in prototypes}
    if len(dims) != 1:
        raise DataError("prototype locations disagree on dimension")
    metadata = doc.get("metadata") if isinstance(doc.get("metadata"), dict) else {}
    return PrototypeModel(prototypes=prototypes, class_order=class_order, metadata=metadata)


def save_model(model: PrototypeModel, path: str):
    atomic_write_text(path, json.dumps(model_to_doc(model), indent=2) + "\n")


def load_model(path: str) -> PrototypeModel:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise DataError(f"cannot open model: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc.msg}") from exc
    return doc_to_model(doc)
