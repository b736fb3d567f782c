"""Episodic N-way k-shot evaluation of the soft classifier and baselines.

Every classifier in a run sees the same support/query splits. Reports
carry per-episode accuracies, sample mean/std, and per-phase timings
(embedding load, line construction, prototype generation).
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .classify import SlpClassifier, classify_1nn, classify_centroid, classify_slp
from .config import SlpConfig, thread_count
from .data import EmbeddingDataset, Episode
from .errors import DataError, SolverError, UsageError
from .pipeline import fit_model
from .vectors import compute_centroids

CLASSIFIERS = ("slp", "1nn", "centroid")

TIMING_KEYS = ("encode_load_ms", "line_construction_ms", "prototype_generation_ms")


@dataclass
class EvalReport:
    """Aggregated outcome of one classifier over a list of episodes."""

    task: str
    shots: int
    classifier: str
    accuracies: list[float]
    mean: float
    std: float
    timings: list[dict]
    hyperparameters: dict
    failures: list[dict] = field(default_factory=list)

    @property
    def episodes(self) -> int:
        return len(self.accuracies)


def sample_mean_std(values: list[float]) -> tuple[float, float]:
    """Arithmetic mean and sample standard deviation (divisor E-1);
    a single value has std 0 by convention."""
    e = len(values)
    if e == 0:
        return (float("nan"), float("nan"))
    mean = sum(values) / e
    if e == 1:
        return (mean, 0.0)
    var = sum((v - mean) ** 2 for v in values) / (e - 1)
    return (mean, math.sqrt(var))


def _resolve(dataset: EmbeddingDataset, episode: Episode):
    index = dataset.index_by_id()
    missing = [i for i in episode.support + episode.query if i not in index]
    if missing:
        raise DataError(
            f"episode references ids not in the dataset: {missing[:3]}"
            + ("..." if len(missing) > 3 else "")
        )
    support = [index[i] for i in episode.support]
    query = [index[i] for i in episode.query]
    counts: dict[str, int] = {}
    for vec in support:
        counts[vec.label] = counts.get(vec.label, 0) + 1
    wrong = {c: n for c, n in counts.items() if n != episode.shots}
    if wrong:
        raise DataError(
            f"support must hold exactly {episode.shots} instances per class; "
            f"got {sorted(wrong.items())}"
        )
    return support, query


def run_episode(
    dataset: EmbeddingDataset, episode: Episode, classifier: str, config: SlpConfig
) -> tuple[float, dict]:
    """Fit one classifier on the episode's support and score its query set.

    Returns (accuracy, phase timings in milliseconds). Baselines have no
    line or prototype phase; those timings are reported as 0.0.
    """
    if classifier not in CLASSIFIERS:
        raise UsageError(
            f"unknown classifier {classifier!r}; expected one of {', '.join(CLASSIFIERS)}"
        )
    start = time.perf_counter_ns()
    support, query = _resolve(dataset, episode)
    encode_ms = (time.perf_counter_ns() - start) / 1e6
    timings = {"encode_load_ms": encode_ms, "line_construction_ms": 0.0,
               "prototype_generation_ms": 0.0}

    if classifier == "slp":
        model = fit_model(support, config)
        timings["line_construction_ms"] = model.metadata["timings_ms"]["line_construction"]
        timings["prototype_generation_ms"] = model.metadata["timings_ms"][
            "prototype_generation"
        ]
        clf = SlpClassifier(model=model, k=config.k)
        predict = lambda x: classify_slp(clf, x).label
    elif classifier == "1nn":
        predict = lambda x: classify_1nn(support, x)
    else:
        centroids = compute_centroids(support)
        predict = lambda x: classify_centroid(centroids, x)

    correct = sum(1 for vec in query if predict(vec.values) == vec.label)
    return correct / len(query), timings


def run_task(
    dataset: EmbeddingDataset,
    episodes: list[Episode],
    classifiers: list[str],
    config: SlpConfig | None = None,
) -> list[EvalReport]:
    """One report per classifier; identical splits for all of them.

    Episodes run concurrently when SLPROTO_THREADS allows; results are
    reduced in episode order so reports are deterministic. A solver
    failure marks that episode failed and the run continues; usage and
    data errors propagate.
    """
    if not episodes:
        raise UsageError("need at least one episode")
    config = config if config is not None else SlpConfig()
    config.validate()
    workers = thread_count()
    reports = []
    for classifier in classifiers:

        def attempt(ep: Episode):
            try:
                return run_episode(dataset, ep, classifier, config)
            except SolverError as exc:
                return exc

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(attempt, episodes))
        else:
            outcomes = [attempt(ep) for ep in episodes]

        accuracies: list[float] = []
        timings: list[dict] = []
        failures: list[dict] = []
        for index, outcome in enumerate(outcomes):
            if isinstance(outcome, Exception):
                failures.append({"episode": index, "reason": str(outcome)})
                continue
            accuracy, timing = outcome
            accuracies.append(accuracy)
            timings.append(timing)
        mean, std = sample_mean_std(accuracies)
        reports.append(
            EvalReport(
                task=episodes[0].task,
                shots=episodes[0].shots,
                classifier=classifier,
                accuracies=accuracies,
                mean=mean,
                std=std,
                timings=timings,
                hyperparameters=config.as_dict(),
                failures=failures,
            )
        )
    return reports


def report_to_doc(report: EvalReport) -> dict:
    return {
        "task": report.task,
        "shots": report.shots,
        "classifier": report.classifier,
        "episodes": report.episodes,
        "accuracies": report.accuracies,
        "mean": None if math.isnan(report.mean) else report.mean,
        "std": None if math.isnan(report.std) else report.std,
        "timings_ms": report.timings,
        "hyperparameters": report.hyperparameters,
        "failures": report.failures,
    }


def reports_to_csv(reports: list[EvalReport]) -> str:
    """One row per classifier x task x shots, with per-phase mean timings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["classifier", "task", "shots", "episodes", "failed", "mean", "std", "accuracies"]
        + list(TIMING_KEYS)
    )
    for r in reports:
        phase_means = []
        for key in TIMING_KEYS:
            vals = [t[key] for t in r.timings]
            phase_means.append(sum(vals) / len(vals) if vals else 0.0)
        writer.writerow(
            [
                r.classifier,
                r.task,
                r.shots,
                r.episodes,
                len(r.failures),
                f"{r.mean:.6f}",
                f"{r.std:.6f}",
                ";".join(f"{a:.6f}" for a in r.accuracies),
            ]
            + [f"{v:.3f}" for v in phase_means]
        )
    return buf.getvalue()
