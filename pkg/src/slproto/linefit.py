"""Cover class centroids with at most l lines.

Two search strategies over the same scoring rule: exhaustive evaluation
of centroid-pair line subsets, and greedy hierarchical clustering with a
residual tolerance. A centroid counts against the score only when it
sits farther than epsilon from every chosen line.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_BUDGET, DEFAULT_EPSILON
from .errors import BudgetExceededError, DegenerateGeometryError, UsageError
from .vectors import CentroidSet, Line, euclidean_distance, fit_line_tls, point_line_distance

EJECTION_SWEEPS = 50


@dataclass(frozen=True)
class LineSet:
    """Chosen lines plus the class bookkeeping derived from them.

    assignment maps each class within epsilon of some line to its
    nearest such line; everything else is uncovered and contributes its
    nearest-line distance to score.
    """

    lines: list[Line]
    assignment: dict[str, int]
    score: float
    uncovered: list[str]
    epsilon: float


def _validate(centroids: CentroidSet, l: int, epsilon: float):
    if centroids.n < 2:
        raise DegenerateGeometryError(
            "at least two class centroids are required to fit lines",
            {"classes": centroids.n},
        )
    if l < 1:
        raise UsageError("line budget l must be at least 1")
    if not epsilon > 0:
        raise UsageError("epsilon must be positive")


def _finalize(raw_lines: list[Line], centroids: CentroidSet, epsilon: float) -> LineSet:
    """Recompute membership, assignment, and score against final lines."""
    classes = centroids.classes
    lines: list[Line] = []
    for line in raw_lines:
        members: list[str] = []
        offsets: list[float] = []
        residuals: list[float] = []
        for ci, cls in enumerate(classes):
            d = point_line_distance(centroids.centroids[ci], line)
            if d <= epsilon:
                members.append(cls)
                offsets.append(float((centroids.centroids[ci] - line.anchor) @ line.direction))
                residuals.append(d)
        order = sorted(range(len(members)), key=lambda i: (offsets[i], members[i]))
        direction = line.direction
        # orient by class ids, not coordinate signs: a line is unoriented,
        # and this keeps member order (hence endpoint order) stable under
        # rigid motions of the input space
        if members[order[0]] > members[order[-1]]:
            direction = -direction
            offsets = [-o for o in offsets]
            order = sorted(range(len(members)), key=lambda i: (offsets[i], members[i]))
        member_offsets = np.array([offsets[i] for i in order])
        lines.append(
            Line(
                anchor=line.anchor,
                direction=direction,
                member_classes=[members[i] for i in order],
                member_offsets=member_offsets,
                endpoints=(
                    line.anchor + member_offsets[0] * direction,
                    line.anchor + member_offsets[-1] * direction,
                ),
                max_residual=max(residuals),
            )
        )

    assignment: dict[str, int] = {}
    uncovered: list[str] = []
    score = 0.0
    for ci, cls in enumerate(classes):
        if not lines:
            uncovered.append(cls)
            continue
        dists = [point_line_distance(centroids.centroids[ci], ln) for ln in lines]
        best = min(range(len(dists)), key=lambda i: dists[i])
        if dists[best] <= epsilon:
            assignment[cls] = best
        else:
            uncovered.append(cls)
            score += dists[best]
    return LineSet(lines=lines, assignment=assignment, score=score, uncovered=uncovered, epsilon=epsilon)


def _pair_lines(centroids: CentroidSet) -> list[Line]:
    """Candidate lines through every centroid pair, in index order."""
    cands = []
    for i, j in itertools.combinations(range(centroids.n), 2):
        cands.append(
            fit_line_tls(
                np.stack([centroids.centroids[i], centroids.centroids[j]]),
                [centroids.classes[i], centroids.classes[j]],
            )
        )
    return cands


def brute_force_lines(
    centroids: CentroidSet,
    l: int,
    budget: int = DEFAULT_BUDGET,
    epsilon: float = DEFAULT_EPSILON,
) -> LineSet:
    """Exhaustive minimum-score search over candidate-line subsets.

    Candidates are all centroid-pair lines; every subset of size up to l
    is scored. The subset count explodes combinatorially, so the search
    refuses to start when it would exceed the evaluation budget.
    """
    _validate(centroids, l, epsilon)
    cands = _pair_lines(centroids)
    max_size = min(l, len(cands))
    total = sum(math.comb(len(cands), s) for s in range(1, max_size + 1))
    if total > budget:
        raise BudgetExceededError(
            f"exhaustive search over {centroids.n} classes with l={l} needs "
            f"{total} subset evaluations, above the budget of {budget}",
            {"classes": centroids.n, "l": l, "required": total, "budget": budget},
        )

    # distance of every centroid to every candidate line, shared by all
    # subset evaluations
    dist = [
        [point_line_distance(centroids.centroids[ci], line) for line in cands]
        for ci in range(centroids.n)
    ]
    best_score = math.inf
    best_subset: tuple[int, ...] | None = None
    done = False
    for size in range(1, max_size + 1):
        for subset in itertools.combinations(range(len(cands)), size):
            score = 0.0
            for ci in range(centroids.n):
                d = min(dist[ci][k] for k in subset)
                if d > epsilon:
                    score += d
            if score < best_score:
                best_score = score
                best_subset = subset
                if best_score == 0.0:
                    done = True
                    break
        if done:
            break
    return _finalize([cands[k] for k in best_subset], centroids, epsilon)


def recursive_regression_lines(centroids: CentroidSet, l: int, epsilon: float) -> LineSet:
    """Greedy hierarchical clustering of centroids under a line-fit
    tolerance.

    Clusters merge while the merged fit stays within epsilon (closest
    clusters first among equal residuals); oversized residual members are
    ejected and re-homed; leftover singletons borrow their nearest
    centroid to form two-point lines while the line budget lasts.
    """
    _validate(centroids, l, epsilon)
    classes = centroids.classes
    pts = centroids.centroids
    n = centroids.n
    # fit noise floor: residuals this small mean "exact fit", and merge
    # priority must fall through to the distance tie-break
    noise_floor = 1e-9 * (1.0 + float(np.max(np.abs(pts))))

    def try_fit(idx: list[int]) -> Line | None:
        try:
            return fit_line_tls(pts[idx], [classes[i] for i in idx])
        except DegenerateGeometryError:
            return None

    def linkage(a: list[int], b: list[int]) -> float:
        return min(euclidean_distance(pts[i], pts[j]) for i in a for j in b)

    clusters: list[list[int]] = [[i] for i in range(n)]

    # agglomerative seeding
    while len(clusters) > 1:
        clusters.sort(key=lambda c: c[0])
        best = None
        for ai in range(len(clusters)):
            for bi in range(ai + 1, len(clusters)):
                union = sorted(clusters[ai] + clusters[bi])
                line = try_fit(union)
                if line is None or line.max_residual > epsilon:
                    continue
                resid = line.max_residual if line.max_residual > noise_floor else 0.0
                key = (resid, linkage(clusters[ai], clusters[bi]), clusters[ai][0], clusters[bi][0])
                if best is None or key < best[0]:
                    best = (key, ai, bi)
        if best is None:
            break
        _, ai, bi = best
        merged = sorted(clusters[ai] + clusters[bi])
        clusters = [c for k, c in enumerate(clusters) if k not in (ai, bi)]
        clusters.append(merged)

    # eject members that drifted beyond tolerance, re-homing them on the
    # nearest existing line or as new singletons
    for _ in range(EJECTION_SWEEPS):
        changed = False
        clusters.sort(key=lambda c: c[0])
        for cluster in list(clusters):
            while len(cluster) >= 3:
                line = try_fit(cluster)
                if line is None:
                    clusters.remove(cluster)
                    clusters.extend([i] for i in cluster)
                    changed = True
                    break
                residuals = [point_line_distance(pts[i], line) for i in cluster]
                worst = max(range(len(cluster)), key=lambda i: residuals[i])
                if residuals[worst] <= epsilon:
                    break
                member = cluster.pop(worst)
                changed = True
                target = None
                target_dist = math.inf
                for other in clusters:
                    if other is cluster or len(other) < 2:
                        continue
                    other_line = try_fit(other)
                    if other_line is None:
                        continue
                    d = point_line_distance(pts[member], other_line)
                    if d <= epsilon and d < target_dist:
                        target = other
                        target_dist = d
                if target is not None:
                    target.append(member)
                    target.sort()
                else:
                    clusters.append([member])
        if not changed:
            break

    # the search never opens more than l multi-member clusters under the
    # default budget; under a tight explicit budget keep the largest
    line_clusters = [c for c in clusters if len(c) >= 2]
    singles = [c[0] for c in clusters if len(c) == 1]
    line_clusters.sort(key=lambda c: (-len(c), c[0]))
    if len(line_clusters) > l:
        for dropped in line_clusters[l:]:
            singles.extend(dropped)
        line_clusters = line_clusters[:l]
    line_clusters.sort(key=lambda c: c[0])
    singles.sort()

    kept: list[list[int]] = []
    for cluster in line_clusters:
        if try_fit(cluster) is None:
            singles.extend(cluster)
            singles.sort()
        else:
            kept.append(cluster)

    # singleton resolution: borrow the nearest centroid for a two-point
    # line while the budget allows; once the budget is gone, try moving a
    # member out of a two-point cluster into a cluster that accepts it
    # within tolerance, freeing its partner to cover the singleton
    for s in singles:
        near = [
            line
            for c in kept
            if (line := try_fit(c)) is not None
            and point_line_distance(pts[s], line) <= epsilon
        ]
        if near:
            continue  # already on an existing line; assignment handles it
        if len(kept) < l:
            partner = None
            partner_dist = math.inf
            for j in range(n):
                if j == s:
                    continue
                d = euclidean_distance(pts[s], pts[j])
                if d > 1e-12 and d < partner_dist:
                    partner = j
                    partner_dist = d
            if partner is not None and try_fit(sorted([s, partner])) is not None:
                kept.append(sorted([s, partner]))
            continue
        moved = False
        for donor in [c for c in kept if len(c) == 2]:
            for mi in range(2):
                member, freed = donor[mi], donor[1 - mi]
                for host in kept:
                    if host is donor:
                        continue
                    line = try_fit(sorted(host + [member]))
                    if line is not None and line.max_residual <= epsilon:
                        host.append(member)
                        host.sort()
                        donor[:] = sorted([s, freed])
                        moved = True
                        break
                if moved:
                    break
            if moved:
                break

    kept.sort(key=lambda c: c[0])
    fitted = [line for c in kept if (line := try_fit(c)) is not None]
    return _finalize(fitted, centroids, epsilon)
