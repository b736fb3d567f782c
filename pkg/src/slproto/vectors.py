"""Dense vector primitives: distances, class centroids, and line geometry."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, UsageError

POWER_ITER_TOL = 1e-10
POWER_ITER_MAX = 1000


@dataclass(frozen=True)
class EmbeddingVector:
    """One embedded instance: id, class label, and a D-dim coordinate.

    text optionally carries the raw string the vector was encoded from.
    """

    id: str
    label: str
    values: np.ndarray
    text: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))


@dataclass(frozen=True)
class CentroidSet:
    """Per-class mean vectors, classes ordered lexicographically."""

    classes: list[str]
    centroids: np.ndarray  # shape (n, D)
    counts: list[int]

    @property
    def n(self) -> int:
        return len(self.classes)

    @property
    def dimension(self) -> int:
        return int(self.centroids.shape[1])

    def centroid_of(self, label: str) -> np.ndarray:
        return self.centroids[self.classes.index(label)]


@dataclass(frozen=True)
class Line:
    """A fitted line: unit direction through an anchor, plus the classes
    placed on it ordered by scalar projection."""

    anchor: np.ndarray
    direction: np.ndarray  # unit norm
    member_classes: list[str]
    member_offsets: np.ndarray  # ascending, ties broken by class id
    endpoints: tuple[np.ndarray, np.ndarray]
    max_residual: float = 0.0

    @property
    def length(self) -> float:
        return float(self.member_offsets[-1] - self.member_offsets[0])

    def point_at(self, offset: float) -> np.ndarray:
        return self.anchor + offset * self.direction


def euclidean_distance(a, b) -> float:
    """Plain L2 distance between two equal-dimension vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise UsageError(
            f"dimension mismatch: {a.shape} vs {b.shape}",
            {"left": list(a.shape), "right": list(b.shape)},
        )
    return float(np.sqrt(np.sum((a - b) ** 2)))


def compute_centroids(support: list[EmbeddingVector]) -> CentroidSet:
    """Arithmetic mean per class over the support instances.

    Class order is lexicographic by class id so downstream indexing is
    stable no matter how the input was ordered.
    """
    if not support:
        raise UsageError("cannot compute centroids of an empty support set")
    dim = support[0].values.shape[0]
    by_label: dict[str, list[np.ndarray]] = {}
    for vec in support:
        if vec.values.shape[0] != dim:
            raise UsageError(
                f"dimension mismatch in support: instance {vec.id!r} has "
                f"{vec.values.shape[0]} values, expected {dim}"
            )
        by_label.setdefault(vec.label, []).append(vec.values)
    classes = sorted(by_label)
    centroids = np.stack([np.mean(by_label[c], axis=0) for c in classes])
    counts = [len(by_label[c]) for c in classes]
    return CentroidSet(classes=classes, centroids=centroids, counts=counts)


def point_line_distance(p, line: Line) -> float:
    """Perpendicular distance from p to the (infinite) line."""
    p = np.asarray(p, dtype=np.float64)
    rel = p - line.anchor
    if rel.shape != line.direction.shape:
        raise UsageError(
            f"dimension mismatch: point has {rel.shape[0]} values, "
            f"line has {line.direction.shape[0]}"
        )
    perp = rel - np.dot(rel, line.direction) * line.direction
    return float(np.sqrt(np.sum(perp**2)))


def _top_direction(centered: np.ndarray) -> np.ndarray:
    """First principal axis of already-centered points via power iteration.

    Uses the m x m Gram matrix when there are fewer points than
    dimensions, otherwise the D x D scatter matrix.
    """
    m, dim = centered.shape
    if m < dim:
        mat = centered @ centered.T
    else:
        mat = centered.T @ centered
    # start from the heaviest coordinate axis: deterministic, and never
    # orthogonal to the matrix range
    v = np.zeros(mat.shape[0])
    v[int(np.argmax(np.diag(mat)))] = 1.0
    for _ in range(POWER_ITER_MAX):
        w = mat @ v
        norm = np.sqrt(np.sum(w**2))
        if norm == 0.0:
            break
        w = w / norm
        if np.sqrt(np.sum((w - v) ** 2)) < POWER_ITER_TOL:
            v = w
            break
        v = w
    if m < dim:
        direction = centered.T @ v
        direction = direction / np.sqrt(np.sum(direction**2))
    else:
        direction = v
    return direction


def _canonical_sign(direction: np.ndarray) -> np.ndarray:
    """Flip the direction so its first nonzero component is positive."""
    for x in direction:
        if abs(x) > 1e-12:
            return direction if x > 0 else -direction
    return direction


def fit_line_tls(points, classes: list[str] | None = None) -> Line:
    """Total-least-squares line through m >= 2 points.

    The direction is the first principal axis of the centered points.
    Returns the line with members sorted by projection (class-id order
    breaks exact ties) and the maximum perpendicular residual.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise UsageError("line fitting needs at least two points")
    if classes is None:
        classes = [str(i) for i in range(pts.shape[0])]
    if len(classes) != pts.shape[0]:
        raise UsageError("one class id per point is required")

    anchor = pts.mean(axis=0)
    centered = pts - anchor
    scale = 1.0 + float(np.max(np.abs(pts)))
    if float(np.max(np.sqrt(np.sum(centered**2, axis=1)))) <= 1e-12 * scale:
        raise DegenerateGeometryError(
            "all points coincide; no line is defined",
            {"points": pts.shape[0]},
        )

    direction = _canonical_sign(_top_direction(centered))
    offsets = centered @ direction
    order = sorted(range(len(classes)), key=lambda i: (offsets[i], classes[i]))
    member_classes = [classes[i] for i in order]
    member_offsets = offsets[order]

    line = Line(
        anchor=anchor,
        direction=direction,
        member_classes=member_classes,
        member_offsets=member_offsets,
        endpoints=(
            anchor + member_offsets[0] * direction,
            anchor + member_offsets[-1] * direction,
        ),
    )
    max_residual = max(point_line_distance(p, line) for p in pts)
    return Line(
        anchor=line.anchor,
        direction=line.direction,
        member_classes=member_classes,
        member_offsets=member_offsets,
        endpoints=line.endpoints,
        max_residual=max_residual,
    )
