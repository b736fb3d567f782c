"""Dataset/episode file formats, sampling determinism, and synthetic data."""

import json

import numpy as np
import pytest

from slproto.data import (
    EmbeddingDataset,
    Episode,
    gen_synthetic,
    load_dataset,
    load_episodes,
    sample_episodes,
    save_dataset,
    save_episodes,
)
from slproto.errors import DataError, UsageError
from slproto.vectors import EmbeddingVector, compute_centroids


def tiny_dataset(dim=3, count=4) -> EmbeddingDataset:
    rng = np.random.default_rng(1)
    instances = [
        EmbeddingVector(f"v{i}", "even" if i % 2 == 0 else "odd", rng.normal(size=dim))
        for i in range(count)
    ]
    return EmbeddingDataset(instances=instances, dimension=dim, metadata={"encoder": "test"})


class TestJsonl:
    def write(self, tmp_path, lines):
        path = tmp_path / "data.jsonl"
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    def test_happy_path(self, tmp_path):
        path = self.write(
            tmp_path,
            [
                json.dumps({"id": "a", "label": "x", "vector": [1.0, 2.0, 3.0]}),
                json.dumps({"id": "b", "label": "y", "vector": [4.0, 5.0, 6.0]}),
            ],
        )
        ds = load_dataset(path)
        assert ds.dimension == 3
        assert len(ds.instances) == 2
        assert ds.classes == ["x", "y"]

    def test_nan_names_the_line(self, tmp_path):
        path = self.write(
            tmp_path,
            [
                json.dumps({"id": "a", "label": "x", "vector": [1.0]}),
                '{"id": "b", "label": "x", "vector": [NaN]}',
            ],
        )
        with pytest.raises(DataError, match=":2"):
            load_dataset(path)

    def test_dimension_mismatch_names_the_line(self, tmp_path):
        path = self.write(
            tmp_path,
            [
                json.dumps({"id": "a", "label": "x", "vector": [1.0, 2.0]}),
                json.dumps({"id": "b", "label": "x", "vector": [1.0]}),
            ],
        )
        with pytest.raises(DataError, match=":2"):
            load_dataset(path)

    def test_duplicate_id_rejected(self, tmp_path):
        record = json.dumps({"id": "a", "label": "x", "vector": [1.0]})
        path = self.write(tmp_path, [record, record])
        with pytest.raises(DataError, match="duplicate"):
            load_dataset(path)

    def test_missing_field_and_bad_json(self, tmp_path):
        path = self.write(tmp_path, [json.dumps({"id": "a", "vector": [1.0]})])
        with pytest.raises(DataError, match="label"):
            load_dataset(path)
        path = self.write(tmp_path, ["{not json"])
        with pytest.raises(DataError, match=":1"):
            load_dataset(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(DataError, match="empty"):
            load_dataset(str(path))

    def test_meta_header_and_text_round_trip(self, tmp_path):
        ds = tiny_dataset()
        ds.instances[0] = EmbeddingVector("v0", "even", ds.instances[0].values, text="hello")
        path = str(tmp_path / "ds.jsonl")
        save_dataset(ds, path)
        back = load_dataset(path)
        assert back.metadata == {"encoder": "test"}
        assert back.instances[0].text == "hello"
        assert back.instances[1].text is None

    def test_round_trip_vectors_bit_identical(self, tmp_path):
        rng = np.random.default_rng(7)
        ds = EmbeddingDataset(
            instances=[
                EmbeddingVector(f"r{i}", "c", rng.normal(scale=1e3, size=16) * 10.0 ** rng.integers(-8, 8))
                for i in range(30)
            ],
            dimension=16,
        )
        path = str(tmp_path / "ds.jsonl")
        save_dataset(ds, path)
        back = load_dataset(path)
        for orig, loaded in zip(ds.instances, back.instances):
            assert orig.values.tobytes() == loaded.values.tobytes()


class TestBinary:
    def test_round_trip_bit_identical(self, tmp_path):
        rng = np.random.default_rng(13)
        ds = EmbeddingDataset(
            instances=[
                EmbeddingVector(f"bin-{i}", f"c{i % 3}", rng.normal(size=9))
                for i in range(25)
            ],
            dimension=9,
        )
        path = str(tmp_path / "ds.slpb")
        save_dataset(ds, path)
        back = load_dataset(path)
        assert len(back.instances) == 25
        for orig, loaded in zip(ds.instances, back.instances):
            assert orig.id == loaded.id
            assert orig.label == loaded.label
            assert orig.values.tobytes() == loaded.values.tobytes()

    def test_unicode_ids_survive(self, tmp_path):
        ds = EmbeddingDataset(
            instances=[EmbeddingVector("идент-✓", "étiquette", np.array([1.5]))],
            dimension=1,
        )
        path = str(tmp_path / "u.slpb")
        save_dataset(ds, path)
        back = load_dataset(path)
        assert back.instances[0].id == "идент-✓"
        assert back.instances[0].label == "étiquette"

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.slpb"
        path.write_bytes(b"NOPE" + b"\x00" * 20)
        with pytest.raises(DataError, match="magic"):
            load_dataset(str(path))

    def test_truncated_file(self, tmp_path):
        ds = tiny_dataset()
        path = str(tmp_path / "t.slpb")
        save_dataset(ds, path)
        raw = open(path, "rb").read()
        open(path, "wb").write(raw[:-5])
        with pytest.raises(DataError, match="truncated"):
            load_dataset(path)

    def test_trailing_bytes(self, tmp_path):
        ds = tiny_dataset()
        path = str(tmp_path / "t.slpb")
        save_dataset(ds, path)
        with open(path, "ab") as handle:
            handle.write(b"\x00")
        with pytest.raises(DataError, match="trailing"):
            load_dataset(path)

    def test_version_mismatch(self, tmp_path):
        ds = tiny_dataset()
        path = str(tmp_path / "t.slpb")
        save_dataset(ds, path)
        raw = bytearray(open(path, "rb").read())
        raw[4] = 99
        open(path, "wb").write(bytes(raw))
        with pytest.raises(DataError, match="version"):
            load_dataset(path)

    def test_explicit_format_overrides_extension(self, tmp_path):
        ds = tiny_dataset()
        path = str(tmp_path / "noext.dat")
        save_dataset(ds, path, fmt="binary")
        back = load_dataset(path, fmt="binary")
        assert len(back.instances) == len(ds.instances)
        with pytest.raises(UsageError):
            load_dataset(path, fmt="parquet")


class TestEpisodeFiles:
    def test_round_trip(self, tmp_path):
        episodes = [
            Episode(task="t", shots=4, support=["a", "b"], query=["c"]),
            Episode(task="t", shots=4, support=["d"], query=["e", "f"]),
        ]
        path = str(tmp_path / "eps.json")
        save_episodes(episodes, path)
        assert load_episodes(path) == episodes

    @pytest.mark.parametrize(
        "obj,excerpt",
        [
            ({"task": "t", "shots": 0, "support": ["a"], "query": ["b"]}, "shots"),
            ({"task": "t", "shots": 1, "support": ["a"], "query": ["a"]}, "overlap"),
            ({"task": "t", "shots": 1, "support": ["a", "a"], "query": ["b"]}, "duplicate"),
            ({"task": "t", "shots": 1, "support": []}, "query"),
            ({"task": "t", "shots": 1, "support": [], "query": ["b"]}, "non-empty"),
        ],
    )
    def test_invalid_episode_rejected(self, tmp_path, obj, excerpt):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps([obj]))
        with pytest.raises(DataError, match=excerpt):
            load_episodes(str(path))

    def test_non_array_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{}")
        with pytest.raises(DataError, match="array"):
            load_episodes(str(path))


class TestSampleEpisodes:
    def two_class_dataset(self, per_class=20, dim=2):
        rng = np.random.default_rng(3)
        instances = []
        for label in ("a", "b"):
            for i in range(per_class):
                instances.append(
                    EmbeddingVector(f"{label}{i}", label, rng.normal(size=dim))
                )
        return EmbeddingDataset(instances=instances, dimension=dim)

    def test_counts_and_rerun_identical(self):
        ds = self.two_class_dataset()
        eps1 = sample_episodes(ds, shots=4, n_episodes=10, seed=7)
        eps2 = sample_episodes(ds, shots=4, n_episodes=10, seed=7)
        assert len(eps1) == 10
        for ep in eps1:
            assert len(ep.support) == 8
            assert len(ep.query) == 40 - 8
        assert eps1 == eps2
        assert eps1 != sample_episodes(ds, shots=4, n_episodes=10, seed=8)

    def test_insufficient_instances_names_class(self):
        ds = self.two_class_dataset(per_class=10)
        with pytest.raises(DataError, match="a has 10"):
            sample_episodes(ds, shots=16, n_episodes=1, seed=0)

    def test_exact_shots_per_class_and_disjointness(self):
        rng = np.random.default_rng(19)
        for _ in range(100):
            n_classes = int(rng.integers(2, 5))
            per_class = int(rng.integers(3, 12))
            shots = int(rng.integers(1, per_class))
            instances = [
                EmbeddingVector(f"c{c}i{i}", f"c{c}", rng.normal(size=2))
                for c in range(n_classes)
                for i in range(per_class)
            ]
            ds = EmbeddingDataset(instances=instances, dimension=2)
            (episode,) = sample_episodes(ds, shots, 1, seed=int(rng.integers(10000)))
            assert not set(episode.support) & set(episode.query)
            assert len(episode.support) + len(episode.query) == len(instances)
            index = ds.index_by_id()
            for c in range(n_classes):
                got = sum(1 for sid in episode.support if index[sid].label == f"c{c}")
                assert got == shots


class TestGenSynthetic:
    def specs(self, sigma=0.05, count=100):
        return [
            {"label": "a", "mean": [0.0, 0.0], "sigma": sigma, "count": count},
            {"label": "b", "mean": [1.0, 0.0], "sigma": sigma, "count": count},
            {"label": "c", "mean": [2.0, 0.0], "sigma": sigma, "count": count},
        ]

    def test_centroids_near_means(self):
        ds = gen_synthetic(self.specs(), seed=11)
        cs = compute_centroids(ds.instances)
        for cls, mean in zip(["a", "b", "c"], [[0, 0], [1, 0], [2, 0]]):
            assert np.linalg.norm(cs.centroid_of(cls) - np.asarray(mean, dtype=float)) < 0.05

    def test_vanishing_sigma_pins_points_to_means(self):
        ds = gen_synthetic(self.specs(sigma=1e-12, count=5), seed=2)
        for vec in ds.instances:
            mean = {"a": [0.0, 0.0], "b": [1.0, 0.0], "c": [2.0, 0.0]}[vec.label]
            np.testing.assert_allclose(vec.values, mean, atol=1e-9)

    def test_dimension_propagates(self):
        ds = gen_synthetic(
            [{"label": "z", "mean": [0.0] * 768, "sigma": 1.0, "count": 3}], seed=0
        )
        assert ds.dimension == 768

    def test_bad_sigma_rejected(self):
        with pytest.raises(UsageError, match="sigma"):
            gen_synthetic([{"label": "a", "mean": [0.0], "sigma": 0.0, "count": 1}], 0)

    def test_seeded_determinism(self):
        a = gen_synthetic(self.specs(count=10), seed=42)
        b = gen_synthetic(self.specs(count=10), seed=42)
        for va, vb in zip(a.instances, b.instances):
            assert va.values.tobytes() == vb.values.tobytes()
