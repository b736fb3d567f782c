"""Soft-label prototype generation at fitted-line endpoints.

Each line gets two prototypes, one per endpoint. Their label
distributions come from a linear program that maximizes the worst-case
dominance margin of every class over the rest at sampled points inside
that class's interval on the line. Classes not reachable by any line
fall back to hard one-hot prototypes at their centroids.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .config import CLAMP_DELTA, SAMPLE_POSITIONS, SlpConfig
from .errors import (
    DegenerateGeometryError,
    InternalError,
    PrototypeGenerationError,
    UsageError,
)
from .linefit import LineSet
from .lp import LinearProgram, solve_lp
from .vectors import CentroidSet, Line


@dataclass(frozen=True)
class SoftLabelPrototype:
    """A location X paired with a class distribution Y.

    soft_label is indexed by the model's global class order; entries for
    classes not on the prototype's source line are exactly zero.
    line_index is None for hard (one-hot centroid) prototypes.
    """

    location: np.ndarray
    soft_label: np.ndarray
    line_index: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "location", np.asarray(self.location, dtype=np.float64))
        object.__setattr__(self, "soft_label", np.asarray(self.soft_label, dtype=np.float64))


@dataclass(frozen=True)
class IntervalLayout:
    """Per-class segments along a line's arc-length parameter.

    intervals is (class-id, start, end) triples that partition [0, L] in
    offset order; boundaries sit at midpoints between consecutive class
    projections.
    """

    line_index: int
    intervals: list[tuple[str, float, float]]

    @property
    def length(self) -> float:
        return self.intervals[-1][2]

    def interval_of(self, class_id: str) -> tuple[float, float]:
        for cls, start, end in self.intervals:
            if cls == class_id:
                return (start, end)
        raise UsageError(f"class {class_id!r} is not on this line")


@dataclass
class PrototypeModel:
    """All prototypes for a task plus the class order they index."""

    prototypes: list[SoftLabelPrototype]
    class_order: list[str]
    metadata: dict

    @property
    def m(self) -> int:
        return len(self.prototypes)

    @property
    def n(self) -> int:
        return len(self.class_order)


def build_intervals(line: Line, line_index: int = 0) -> IntervalLayout:
    """Split [0, L] into one interval per member class.

    Boundaries are midpoints between consecutive projections; the first
    interval starts at 0 and the last ends at L.
    """
    if len(line.member_classes) < 2:
        raise UsageError("interval layout needs a line with at least two classes")
    rel = line.member_offsets - line.member_offsets[0]
    length = float(rel[-1])
    scale = 1e-12 * (1.0 + length)
    for i in range(1, len(rel)):
        if rel[i] - rel[i - 1] <= scale:
            raise DegenerateGeometryError(
                "coincident centroid projections leave a zero-width interval",
                {
                    "line": line_index,
                    "classes": [line.member_classes[i - 1], line.member_classes[i]],
                },
            )
    bounds = [0.0]
    for i in range(1, len(rel)):
        bounds.append(float((rel[i - 1] + rel[i]) / 2.0))
    bounds.append(length)
    intervals = [
        (cls, bounds[i], bounds[i + 1]) for i, cls in enumerate(line.member_classes)
    ]
    return IntervalLayout(line_index=line_index, intervals=intervals)


def influence(y1, y2, t: float, length: float) -> np.ndarray:
    """Combined pull of both endpoint labels at interior parameter t.

    Component-wise Y1/t + Y2/(L-t); t must be strictly inside (0, L) so
    both endpoint distances are nonzero.
    """
    if not 0.0 < t < length:
        raise UsageError(
            f"influence is defined on the open segment only, got t={t} with L={length}"
        )
    y1 = np.asarray(y1, dtype=np.float64)
    y2 = np.asarray(y2, dtype=np.float64)
    return y1 / t + y2 / (length - t)


def sample_points(layout: IntervalLayout) -> list[tuple[str, float]]:
    """LP constraint points: fixed relative positions inside each interval.

    Points landing within delta*L of a line endpoint are clamped inward
    so the inverse-distance influence stays finite.
    """
    length = layout.length
    low = CLAMP_DELTA * length
    high = length - low
    out: list[tuple[str, float]] = []
    for cls, start, end in layout.intervals:
        width = end - start
        for pos in SAMPLE_POSITIONS:
            t = start + pos * width
            out.append((cls, float(min(max(t, low), high))))
    return out


def _margin_program(layout: IntervalLayout) -> LinearProgram:
    """Variables [Y1 | Y2 | m]: maximize m s.t. distributions sum to 1 and
    each sampled point's own class dominates the rest by at least m."""
    n = len(layout.intervals)
    length = layout.length
    classes = [cls for cls, _, _ in layout.intervals]
    nv = 2 * n + 1
    constraints: list[tuple[np.ndarray, str, float]] = []
    for block in (0, n):
        row = np.zeros(nv)
        row[block : block + n] = 1.0
        constraints.append((row, "=", 1.0))
    for cls, t in sample_points(layout):
        signs = np.full(n, -1.0)
        signs[classes.index(cls)] = 1.0
        row = np.zeros(nv)
        row[0:n] = signs / t
        row[n : 2 * n] = signs / (length - t)
        row[2 * n] = -1.0
        constraints.append((row, ">=", 0.0))
    objective = np.zeros(nv)
    objective[2 * n] = 1.0
    bounds = [(0.0, None)] * (2 * n) + [(None, None)]
    return LinearProgram(objective=objective, constraints=constraints, bounds=bounds)


def _audit(y1m: np.ndarray, y2m: np.ndarray, layout: IntervalLayout):
    """With a positive margin, every sampled point must classify to the
    interval that contains it. A miss means the solver lied."""
    classes = [cls for cls, _, _ in layout.intervals]
    for cls, t in sample_points(layout):
        winner = int(np.argmax(influence(y1m, y2m, t, layout.length)))
        if classes[winner] != cls:
            raise InternalError(
                "prototype audit failed: sampled point not dominated by its class",
                {"line": layout.line_index, "class": cls, "t": t, "winner": classes[winner]},
            )


def _embed(member_classes: list[str], values: np.ndarray, class_order: list[str]) -> np.ndarray:
    full = np.zeros(len(class_order))
    for cls, val in zip(member_classes, values):
        try:
            full[class_order.index(cls)] = val
        except ValueError:
            raise UsageError(f"line class {cls!r} missing from the model class order")
    return full


def generate_line_prototypes(
    line: Line,
    layout: IntervalLayout,
    config: SlpConfig | None = None,
    class_order: list[str] | None = None,
) -> tuple[SoftLabelPrototype, SoftLabelPrototype, float]:
    """Solve the margin LP for one line; prototypes sit at its endpoints.

    Returns (near-end prototype, far-end prototype, achieved margin).
    Soft labels are embedded into class_order (default: the line's
    classes in id order) with zeros off the line.
    """
    del config  # sampling scheme is fixed; kept for signature stability
    if class_order is None:
        class_order = sorted(line.member_classes)
    solution = solve_lp(_margin_program(layout))
    if solution.status == "infeasible":
        raise PrototypeGenerationError(
            "label program infeasible for line",
            {"line": layout.line_index, "classes": line.member_classes},
        )
    if solution.status == "unbounded":
        raise InternalError(
            "label program unbounded despite distribution normalization",
            {"line": layout.line_index},
        )
    n = len(line.member_classes)
    margin = float(solution.objective_value)
    y1m = np.maximum(solution.values[0:n], 0.0)
    y2m = np.maximum(solution.values[n : 2 * n], 0.0)
    for name, y in (("near", y1m), ("far", y2m)):
        total = float(y.sum())
        if total <= 0.0:
            raise InternalError(
                f"{name} endpoint label lost all mass", {"line": layout.line_index}
            )
        y /= total
    if margin > 0.0:
        _audit(y1m, y2m, layout)
    near = SoftLabelPrototype(
        location=line.endpoints[0],
        soft_label=_embed(line.member_classes, y1m, class_order),
        line_index=layout.line_index,
    )
    far = SoftLabelPrototype(
        location=line.endpoints[1],
        soft_label=_embed(line.member_classes, y2m, class_order),
        line_index=layout.line_index,
    )
    return near, far, margin


def _hard_prototype(centroids: CentroidSet, class_id: str) -> SoftLabelPrototype:
    label = np.zeros(centroids.n)
    label[centroids.classes.index(class_id)] = 1.0
    return SoftLabelPrototype(
        location=centroids.centroid_of(class_id),
        soft_label=label,
        line_index=None,
    )


def generate_prototype_model(
    centroids: CentroidSet,
    lineset: LineSet,
    config: SlpConfig | None = None,
) -> PrototypeModel:
    """Assemble the full prototype set for a task.

    Two LP prototypes per line, in line order; a one-hot centroid
    prototype for every class no line covers. A line whose LP fails
    degrades to hard prototypes for its assigned classes and leaves a
    warning instead of aborting the task.
    """
    config = config if config is not None else SlpConfig()
    start = time.perf_counter_ns()
    class_order = centroids.classes
    prototypes: list[SoftLabelPrototype] = []
    warnings: list[str] = []
    line_meta: list[dict] = []
    for index, line in enumerate(lineset.lines):
        assigned = sorted(c for c, li in lineset.assignment.items() if li == index)
        meta = {
            "index": index,
            "classes": list(line.member_classes),
            "assigned": assigned,
            "offsets": [float(o - line.member_offsets[0]) for o in line.member_offsets],
            "length": line.length,
            "max_residual": line.max_residual,
            "margin": None,
            "fallback": False,
        }
        try:
            layout = build_intervals(line, index)
            near, far, margin = generate_line_prototypes(
                line, layout, config, class_order=class_order
            )
            prototypes.extend([near, far])
            meta["margin"] = margin
        except (PrototypeGenerationError, DegenerateGeometryError) as exc:
            warnings.append(f"line {index}: {exc.message}; using hard prototypes")
            meta["fallback"] = True
            for cls in assigned:
                prototypes.append(_hard_prototype(centroids, cls))
        line_meta.append(meta)
    for cls in sorted(lineset.uncovered):
        prototypes.append(_hard_prototype(centroids, cls))
    elapsed_ms = (time.perf_counter_ns() - start) / 1e6
    metadata = {
        "lines": line_meta,
        "uncovered": sorted(lineset.uncovered),
        "warnings": warnings,
        "hyperparameters": config.as_dict(),
        "timings_ms": {"prototype_generation": elapsed_ms},
    }
    return PrototypeModel(prototypes=prototypes, class_order=class_order, metadata=metadata)
