"""Distance-weighted soft-label kNN plus the two hard baselines.

The soft classifier sums the k nearest prototypes' label distributions,
each divided by its Euclidean distance to the query, and predicts the
argmax. Baselines: nearest support instance (1-NN) and nearest class
centroid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .prototypes import PrototypeModel
from .vectors import CentroidSet, EmbeddingVector, euclidean_distance

ZERO_DISTANCE = 1e-12


@dataclass(frozen=True)
class SlpClassifier:
    """Immutable prototype classifier; safe to share across threads."""

    model: PrototypeModel
    k: int = 1
    _locations: np.ndarray = field(init=False, repr=False)
    _labels: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = self.model.m
        if m < 1:
            raise UsageError("classifier needs a model with at least one prototype")
        if not 1 <= self.k <= m:
            raise UsageError(
                f"k must be between 1 and {m} (the model has {m} prototypes), got {self.k}"
            )
        object.__setattr__(
            self, "_locations", np.stack([p.location for p in self.model.prototypes])
        )
        object.__setattr__(
            self, "_labels", np.stack([p.soft_label for p in self.model.prototypes])
        )

    @property
    def class_order(self) -> list[str]:
        return self.model.class_order


@dataclass(frozen=True)
class Prediction:
    label: str
    scores: np.ndarray
    neighbor_indices: list[int]
    neighbor_distances: list[float]


def classify_slp(clf: SlpClassifier, x) -> Prediction:
    """Predict argmax of sum(Y_i / d(X_i, x)) over the k nearest prototypes.

    Distance ties keep the lower prototype index; argmax ties keep the
    lower class index. A query within 1e-12 of a prototype short-circuits
    to that prototype's own argmax, the limit of the weighting as d -> 0.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (clf._locations.shape[1],):
        raise UsageError(
            f"query has {x.shape} values, model expects {clf._locations.shape[1]}"
        )
    dists = np.sqrt(np.sum((clf._locations - x) ** 2, axis=1))
    hits = np.flatnonzero(dists < ZERO_DISTANCE)
    if hits.size:
        idx = int(hits[0])
        scores = clf._labels[idx].copy()
        return Prediction(
            label=clf.class_order[int(np.argmax(scores))],
            scores=scores,
            neighbor_indices=[idx],
            neighbor_distances=[float(dists[idx])],
        )
    order = np.argsort(dists, kind="stable")[: clf.k]
    scores = np.zeros(len(clf.class_order))
    for i in order:
        scores += clf._labels[i] / dists[i]
    return Prediction(
        label=clf.class_order[int(np.argmax(scores))],
        scores=scores,
        neighbor_indices=[int(i) for i in order],
        neighbor_distances=[float(dists[i]) for i in order],
    )


def classify_1nn(support: list[EmbeddingVector], x) -> str:
    """Label of the Euclidean-nearest support instance; ties by id."""
    if not support:
        raise UsageError("1-NN needs a non-empty support set")
    best = min(support, key=lambda vec: (euclidean_distance(vec.values, x), vec.id))
    return best.label


def classify_centroid(centroids: CentroidSet, x) -> str:
    """Class of the nearest centroid; ties by class id."""
    if centroids.n < 1:
        raise UsageError("nearest-centroid needs at least one class")
    x = np.asarray(x, dtype=np.float64)
    dists = np.sqrt(np.sum((centroids.centroids - x) ** 2, axis=1))
    return centroids.classes[int(np.argmin(dists))]
