"""Shared synthetic-geometry builders for the test suite."""

from __future__ import annotations

import numpy as np

from slproto.vectors import CentroidSet


def make_centroids(points, classes: list[str] | None = None) -> CentroidSet:
    pts = np.asarray(points, dtype=np.float64)
    if classes is None:
        classes = [f"c{i}" for i in range(len(pts))]
    order = sorted(range(len(classes)), key=lambda i: classes[i])
    return CentroidSet(
        classes=[classes[i] for i in order],
        centroids=pts[order],
        counts=[1] * len(classes),
    )


def random_unit(rng, dim: int) -> np.ndarray:
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def collinear_group_config(rng, group_sizes: tuple[int, ...], dim: int) -> CentroidSet:
    """Disjoint exactly-collinear groups, far apart from each other.

    Groups of size 1 are lone centroids. Class labels are shuffled so
    group structure never leaks through label order.
    """
    points = []
    for gi, size in enumerate(group_sizes):
        anchor = rng.normal(size=dim)
        anchor[0] += 25.0 * gi  # keep groups well separated
        direction = random_unit(rng, dim)
        offsets = np.sort(rng.uniform(-1.5, 1.5, size=size))
        while size > 1 and np.min(np.diff(offsets)) < 0.2:
            offsets = np.sort(rng.uniform(-1.5, 1.5, size=size))
        for off in offsets:
            points.append(anchor + off * direction)
    n = len(points)
    labels = [f"c{i}" for i in rng.permutation(n)]
    return make_centroids(np.asarray(points), labels)


def scatter_config(rng, n: int, dim: int, spread: float = 1.0) -> CentroidSet:
    pts = rng.normal(size=(n, dim)) * spread
    labels = [f"c{i}" for i in range(n)]
    return make_centroids(pts, labels)
