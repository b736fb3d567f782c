"""Dataset and episode file I/O plus synthetic data generation.

Two dataset formats share one in-memory type: line-oriented JSON for
interop and a compact binary layout for speed. Episode files are plain
JSON arrays. All writes go through a temp file and an atomic rename.
"""

from __future__ import annotations

import json
import math
import os
import struct
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, UsageError
from .vectors import EmbeddingVector

BINARY_MAGIC = b"SLPB"
BINARY_VERSION = 1
FORMATS = ("jsonl", "binary")


@dataclass
class EmbeddingDataset:
    """Validated, immutable-by-convention collection of embeddings."""

    instances: list[EmbeddingVector]
    dimension: int
    metadata: dict = field(default_factory=dict)

    @property
    def classes(self) -> list[str]:
        return sorted({v.label for v in self.instances})

    def by_label(self) -> dict[str, list[EmbeddingVector]]:
        out: dict[str, list[EmbeddingVector]] = {}
        for vec in self.instances:
            out.setdefault(vec.label, []).append(vec)
        return out

    def index_by_id(self) -> dict[str, EmbeddingVector]:
        return {v.id: v for v in self.instances}


@dataclass(frozen=True)
class Episode:
    """One N-way k-shot split: which instance ids to fit on and score on."""

    task: str
    shots: int
    support: list[str]
    query: list[str]


def atomic_write_bytes(path: str, payload: bytes):
    """Write via a sibling temp file and rename so readers never see a
    half-written file."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str, payload: str):
    atomic_write_bytes(path, payload.encode("utf-8"))


def _infer_format(path: str, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in FORMATS:
            raise UsageError(f"unknown dataset format {fmt!r}; expected jsonl or binary")
        return fmt
    return "binary" if path.endswith(".slpb") else "jsonl"


def _validate_collected(records: list[EmbeddingVector], path: str) -> EmbeddingDataset:
    if not records:
        raise DataError(f"{path}: dataset is empty")
    seen: set[str] = set()
    for vec in records:
        if vec.id in seen:
            raise DataError(f"{path}: duplicate instance id {vec.id!r}")
        seen.add(vec.id)
    return EmbeddingDataset(
        instances=records, dimension=int(records[0].values.shape[0])
    )


def _parse_jsonl_record(obj, path: str, lineno: int, dim: int | None) -> EmbeddingVector:
    if not isinstance(obj, dict):
        raise DataError(f"{path}:{lineno}: record is not an object")
    for key in ("id", "label", "vector"):
        if key not in obj:
            raise DataError(f"{path}:{lineno}: record missing {key!r}")
    if not isinstance(obj["id"], str) or not isinstance(obj["label"], str):
        raise DataError(f"{path}:{lineno}: id and label must be strings")
    vector = obj["vector"]
    if not isinstance(vector, list) or not vector:
        raise DataError(f"{path}:{lineno}: vector must be a non-empty array")
    values = np.asarray(vector, dtype=np.float64)
    if values.ndim != 1:
        raise DataError(f"{path}:{lineno}: vector must be flat")
    if dim is not None and values.shape[0] != dim:
        raise DataError(
            f"{path}:{lineno}: dimension mismatch: got {values.shape[0]}, expected {dim}"
        )
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path}:{lineno}: non-finite value in record {obj['id']!r}")
    text = obj.get("text")
    if text is not None and not isinstance(text, str):
        raise DataError(f"{path}:{lineno}: text must be a string when present")
    return EmbeddingVector(id=obj["id"], label=obj["label"], values=values, text=text)


def _load_jsonl(path: str) -> EmbeddingDataset:
    records: list[EmbeddingVector] = []
    metadata: dict = {}
    dim: int | None = None
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open dataset: {exc}") from exc
    with handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            if lineno == 1 and isinstance(obj, dict) and "meta" in obj and "id" not in obj:
                if not isinstance(obj["meta"], dict):
                    raise DataError(f"{path}:1: meta header must be an object")
                metadata = obj["meta"]
                continue
            vec = _parse_jsonl_record(obj, path, lineno, dim)
            dim = dim if dim is not None else int(vec.values.shape[0])
            records.append(vec)
    dataset = _validate_collected(records, path)
    dataset.metadata = metadata
    return dataset


def _read_exact(handle, count: int, path: str, what: str) -> bytes:
    chunk = handle.read(count)
    if len(chunk) != count:
        raise DataError(f"{path}: truncated file while reading {what}")
    return chunk


def _load_binary(path: str) -> EmbeddingDataset:
    try:
        handle = open(path, "rb")
    except OSError as exc:
        raise DataError(f"cannot open dataset: {exc}") from exc
    records: list[EmbeddingVector] = []
    with handle:
        if _read_exact(handle, 4, path, "magic") != BINARY_MAGIC:
            raise DataError(f"{path}: not a binary embedding file (bad magic)")
        (version,) = struct.unpack("<H", _read_exact(handle, 2, path, "version"))
        if version != BINARY_VERSION:
            raise DataError(f"{path}: unsupported binary version {version}")
        (dim,) = struct.unpack("<I", _read_exact(handle, 4, path, "dimension"))
        (count,) = struct.unpack("<Q", _read_exact(handle, 8, path, "count"))
        if dim < 1:
            raise DataError(f"{path}: dimension must be positive")
        for index in range(count):
            fields = []
            for what in ("id", "label"):
                (length,) = struct.unpack(
                    "<I", _read_exact(handle, 4, path, f"record {index} {what} length")
                )
                raw = _read_exact(handle, length, path, f"record {index} {what}")
                try:
                    fields.append(raw.decode("utf-8"))
                except UnicodeDecodeError as exc:
                    raise DataError(f"{path}: record {index} has invalid UTF-8") from exc
            values = np.frombuffer(
                _read_exact(handle, 8 * dim, path, f"record {index} vector"),
                dtype="<f8",
            ).astype(np.float64)
            if not np.all(np.isfinite(values)):
                raise DataError(f"{path}: non-finite value in record {fields[0]!r}")
            records.append(EmbeddingVector(id=fields[0], label=fields[1], values=values))
        if handle.read(1):
            raise DataError(f"{path}: trailing bytes after {count} records")
    return _validate_collected(records, path)


def load_dataset(path: str, fmt: str | None = None) -> EmbeddingDataset:
    """Read and validate a dataset; format inferred from the extension
    (.slpb is binary) unless given explicitly."""
    if _infer_format(path, fmt) == "binary":
        return _load_binary(path)
    return _load_jsonl(path)


def save_dataset(dataset: EmbeddingDataset, path: str, fmt: str | None = None):
    """Write a dataset atomically in either format.

    JSON floats round-trip bit-exactly (shortest-repr serialization);
    the binary format stores raw little-endian float64.
    """
    if _infer_format(path, fmt) == "binary":
        parts = [
            BINARY_MAGIC,
            struct.pack("<H", BINARY_VERSION),
            struct.pack("<I", dataset.dimension),
            struct.pack("<Q", len(dataset.instances)),
        ]
        for vec in dataset.instances:
            for s in (vec.id, vec.label):
                raw = s.encode("utf-8")
                parts.append(struct.pack("<I", len(raw)))
                parts.append(raw)
            parts.append(vec.values.astype("<f8").tobytes())
        atomic_write_bytes(path, b"".join(parts))
        return
    lines = []
    if dataset.metadata:
        lines.append(json.dumps({"meta": dataset.metadata}, sort_keys=True))
    for vec in dataset.instances:
        record = {"id": vec.id, "label": vec.label, "vector": vec.values.tolist()}
        if vec.text is not None:
            record["text"] = vec.text
        lines.append(json.dumps(record))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _validate_episode_obj(obj, path: str, index: int) -> Episode:
    if not isinstance(obj, dict):
        raise DataError(f"{path}: episode {index} is not an object")
    for key in ("task", "shots", "support", "query"):
        if key not in obj:
            raise DataError(f"{path}: episode {index} missing {key!r}")
    if not isinstance(obj["task"], str):
        raise DataError(f"{path}: episode {index} task must be a string")
    if not isinstance(obj["shots"], int) or obj["shots"] < 1:
        raise DataError(f"{path}: episode {index} shots must be a positive integer")
    for key in ("support", "query"):
        ids = obj[key]
        if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
            raise DataError(f"{path}: episode {index} {key} must be a list of ids")
        if len(set(ids)) != len(ids):
            raise DataError(f"{path}: episode {index} has duplicate {key} ids")
    overlap = set(obj["support"]) & set(obj["query"])
    if overlap:
        raise DataError(
            f"{path}: episode {index} support and query overlap: {sorted(overlap)[:3]}"
        )
    if not obj["support"] or not obj["query"]:
        raise DataError(f"{path}: episode {index} needs non-empty support and query")
    return Episode(
        task=obj["task"], shots=obj["shots"], support=obj["support"], query=obj["query"]
    )


def load_episodes(path: str) -> list[Episode]:
    """Read a JSON array of episode splits."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise DataError(f"cannot open episodes: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc.msg}") from exc
    if not isinstance(payload, list) or not payload:
        raise DataError(f"{path}: expected a non-empty JSON array of episodes")
    return [_validate_episode_obj(obj, path, i) for i, obj in enumerate(payload)]


def save_episodes(episodes: list[Episode], path: str):
    payload = [
        {"task": e.task, "shots": e.shots, "support": e.support, "query": e.query}
        for e in episodes
    ]
    atomic_write_text(path, json.dumps(payload, indent=2) + "\n")


def sample_episodes(
    dataset: EmbeddingDataset,
    shots: int,
    n_episodes: int,
    seed: int,
    task: str = "sampled",
) -> list[Episode]:
    """Draw support sets per class without replacement; the rest of the
    dataset is the query pool. Deterministic for a given seed."""
    if shots < 1:
        raise UsageError("shots must be at least 1")
    if n_episodes < 1:
        raise UsageError("need at least one episode")
    groups = dataset.by_label()
    short = {label: len(vs) for label, vs in groups.items() if len(vs) < shots + 1}
    if short:
        detail = ", ".join(f"{label} has {n}" for label, n in sorted(short.items()))
        raise DataError(
            f"every class needs at least {shots + 1} instances to sample "
            f"{shots}-shot episodes: {detail}"
        )
    rng = np.random.default_rng(seed)
    labels = sorted(groups)
    episodes = []
    for _ in range(n_episodes):
        support: list[str] = []
        chosen: set[str] = set()
        for label in labels:
            ids = [v.id for v in groups[label]]
            picks = rng.choice(len(ids), size=shots, replace=False)
            for p in picks:
                support.append(ids[int(p)])
                chosen.add(ids[int(p)])
        query = [v.id for v in dataset.instances if v.id not in chosen]
        episodes.append(Episode(task=task, shots=shots, support=support, query=query))
    return episodes


def sample_support(
    dataset: EmbeddingDataset, shots: int, seed: int
) -> list[EmbeddingVector]:
    """Pick `shots` instances per class without replacement (seeded).

    Unlike episode sampling this keeps no query pool, so classes only
    need `shots` instances each.
    """
    if shots < 1:
        raise UsageError("shots must be at least 1")
    groups = dataset.by_label()
    short = {label: len(vs) for label, vs in groups.items() if len(vs) < shots}
    if short:
        detail = ", ".join(f"{label} has {n}" for label, n in sorted(short.items()))
        raise DataError(
            f"every class needs at least {shots} instances to sample a "
            f"{shots}-shot support set: {detail}"
        )
    rng = np.random.default_rng(seed)
    support: list[EmbeddingVector] = []
    for label in sorted(groups):
        members = groups[label]
        picks = rng.choice(len(members), size=shots, replace=False)
        support.extend(members[int(p)] for p in picks)
    return support


def gen_synthetic(class_specs: list[dict], seed: int) -> EmbeddingDataset:
    """Isotropic Gaussian blobs, one spec per class.

    Each spec is {"label", "mean": [..], "sigma": > 0, "count": >= 1}.
    """
    if not class_specs:
        raise UsageError("need at least one class spec")
    dim = None
    labels = set()
    for spec in class_specs:
        for key in ("label", "mean", "sigma", "count"):
            if key not in spec:
                raise UsageError(f"class spec missing {key!r}")
        if spec["label"] in labels:
            raise UsageError(f"duplicate class label {spec['label']!r}")
        labels.add(spec["label"])
        sigma = float(spec["sigma"])
        if not (math.isfinite(sigma) and sigma > 0):
            raise UsageError(f"sigma must be positive, got {spec['sigma']}")
        if int(spec["count"]) < 1:
            raise UsageError("count must be at least 1")
        mean = np.asarray(spec["mean"], dtype=np.float64)
        if mean.ndim != 1 or not np.all(np.isfinite(mean)):
            raise UsageError("mean must be a flat finite vector")
        if dim is None:
            dim = mean.shape[0]
        elif mean.shape[0] != dim:
            raise UsageError("all class means must share one dimension")
    rng = np.random.default_rng(seed)
    instances: list[EmbeddingVector] = []
    for spec in class_specs:
        label = spec["label"]
        points = rng.normal(
            np.asarray(spec["mean"], dtype=np.float64),
            float(spec["sigma"]),
            size=(int(spec["count"]), dim),
        )
        for i, p in enumerate(points):
            instances.append(EmbeddingVector(id=f"{label}-{i:04d}", label=label, values=p))
    return EmbeddingDataset(
        instances=instances,
        dimension=dim,
        metadata={"encoder": "synthetic-gaussian", "pooling": "sequence-level", "seed": seed},
    )
