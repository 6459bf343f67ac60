"""Persistence: text/binary round trips, format errors, label escaping."""

from pathlib import Path

import numpy as np
import pytest

import senseforge as sf
from senseforge.model import WordVectors, parse_label
from senseforge.store import LoadError, build_manifest, load, save_binary, save_text

DATA = Path(__file__).parent / "data"


def small_model(v=4, d=3, k=1, seed=0, words=None):
    words = words or [f"w{i}" for i in range(v)]
    vocab = sf.Vocabulary(words, list(range(10 + v, 10, -1))[:v])
    cfg = sf.TrainingConfig(dim=d, min_count=1, senses=k, seed=seed)
    return sf.SenseModel.initialize(vocab, cfg, "mssg" if k > 1 else "word", k)


class TestSaveText:
    def test_global_row_count_and_header(self, tmp_path):
        path = tmp_path / "m.txt"
        rows = save_text(small_model(v=2, d=3), path, include="global")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert rows == 2
        assert len(lines) == 3
        assert lines[0] == "2 3"

    def test_mssg_both_header(self, tmp_path):
        path = tmp_path / "m.txt"
        save_text(small_model(v=2, d=3, k=3), path, include="both")
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert header == "8 3"  # 2 global + 6 sense rows

    def test_round_trip_within_text_precision(self, tmp_path):
        model = small_model(v=5, d=8, k=2, seed=3)
        path = tmp_path / "m.txt"
        save_text(model, path, include="both")
        loaded = load(path)
        original = model.as_vectors("both")
        assert loaded.labels == original.labels
        np.testing.assert_allclose(loaded.vectors, original.vectors, atol=1e-5)

    def test_sense_labels(self, tmp_path):
        path = tmp_path / "m.txt"
        save_text(small_model(v=2, d=3, k=2), path, include="senses")
        labels = [line.split()[0] for line in
                  path.read_text(encoding="utf-8").splitlines()[1:]]
        assert labels == ["w0#0", "w0#1", "w1#0", "w1#1"]


class TestSaveBinary:
    def test_round_trip_bit_exact(self, tmp_path):
        model = small_model(v=6, d=5, k=2, seed=9)
        path = tmp_path / "m.bin"
        save_binary(model, path)
        loaded = load(path)
        original = model.as_vectors("both")
        assert loaded.labels == original.labels
        assert np.array_equal(loaded.vectors, original.vectors)
        assert loaded.kind == "mssg"

    def test_full_dump_carries_cluster_state(self, tmp_path):
        model = small_model(v=3, d=4, k=2, seed=1)
        model.cluster_counts[:] = 7
        path = tmp_path / "m.bin"
        save_binary(model, path)
        plain = small_model(v=3, d=4, k=1, seed=1)
        path2 = tmp_path / "p.bin"
        save_binary(plain, path2)
        assert path.stat().st_size > path2.stat().st_size * 2  # centroid block present

    def test_manifest_embedded(self, tmp_path):
        path = tmp_path / "m.bin"
        save_binary(small_model(v=3, d=4, k=2), path)
        loaded = load(path)
        assert loaded.manifest["model_kind"] == "mssg"
        assert loaded.manifest["dim"] == 4
        assert loaded.manifest["senses"] == 2
        assert loaded.manifest["config"]["window"] == 5


class TestManifestSidecar:
    def test_written_for_both_formats(self, tmp_path):
        model = small_model(v=2, d=3)
        save_text(model, tmp_path / "m.txt")
        save_binary(model, tmp_path / "m.bin")
        for name in ("m.txt.manifest", "m.bin.manifest"):
            text = (tmp_path / name).read_text(encoding="utf-8")
            assert "model_kind: word" in text
            assert "dim: 3" in text
            assert "config.dim: 3" in text

    def test_build_manifest_fields(self):
        manifest = build_manifest(small_model(v=2, d=3, k=2))
        assert manifest["rows"] == 6  # 2 global + 2*2 sense rows
        assert manifest["words"] == 2


class TestLoadErrors:
    def test_row_count_mismatch(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("2 3\na 1 2 3\nb 1 2 3\nc 1 2 3\n", encoding="utf-8")
        with pytest.raises(LoadError, match="row count mismatch"):
            load(path)

    def test_too_few_rows(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("2 3\na 1 2 3\n", encoding="utf-8")
        with pytest.raises(LoadError, match="row count mismatch"):
            load(path)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("banana\n", encoding="utf-8")
        with pytest.raises(LoadError, match="header"):
            load(path)

    def test_row_length_mismatch_names_line(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("2 3\na 1 2 3\nb 1 2\n", encoding="utf-8")
        with pytest.raises(LoadError, match="line 3"):
            load(path)

    def test_duplicate_label(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("2 2\na 1 2\na 3 4\n", encoding="utf-8")
        with pytest.raises(LoadError, match="duplicate"):
            load(path)

    def test_noncontiguous_sense_indices(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("2 2\nw#0 1 2\nw#2 3 4\n", encoding="utf-8")
        with pytest.raises(LoadError, match="contiguous"):
            load(path)

    def test_truncated_binary(self, tmp_path):
        path = tmp_path / "m.bin"
        save_binary(small_model(), path)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) // 2])
        with pytest.raises(LoadError, match="truncated"):
            load(path)


class TestExternalFormat:
    def test_external_dump_serves_neighbors(self):
        wv = load(DATA / "mini_word2vec.txt")
        assert wv.kind == "word"
        result = sf.nearest_neighbors(wv, "banco", topn=2)
        assert result.pairs[0][0] == "dinheiro"

    def test_external_dump_solves_analogies(self):
        wv = load(DATA / "mini_word2vec.txt")
        result = sf.solve_analogy(wv, "banco", "dinheiro", "madeira", topn=1)
        assert len(result.pairs) == 1


class TestLabelEscaping:
    def test_hash_in_surface_round_trips(self, tmp_path):
        words = ["plain", "has#hash", "c#3"]
        vocab = sf.Vocabulary(words, [3, 2, 1])
        cfg = sf.TrainingConfig(dim=3, min_count=1, senses=2, seed=0)
        model = sf.SenseModel.initialize(vocab, cfg, "mssg", 2)
        path = tmp_path / "m.txt"
        save_text(model, path, include="both")
        loaded = load(path)
        words_seen = {parse_label(lab) for lab in loaded.labels}
        assert ("has#hash", None) in words_seen
        assert ("has#hash", 0) in words_seen
        assert ("c#3", None) in words_seen
        assert ("c#3", 1) in words_seen

    def test_parse_label_cases(self):
        assert parse_label("banco") == ("banco", None)
        assert parse_label("banco#2") == ("banco", 2)
        assert parse_label("a##0") == ("a#0", None)
        assert parse_label("a###0") == ("a#", 0)
        assert parse_label("w5") == ("w5", None)
        assert parse_label("livro|N#1") == ("livro|N", 1)

    def test_convert_text_to_binary_and_back(self, tmp_path):
        model = small_model(v=4, d=3, k=2, seed=2)
        t1 = tmp_path / "a.txt"
        save_text(model, t1, include="both")
        b = tmp_path / "a.bin"
        save_binary(load(t1), b)
        t2 = tmp_path / "b.txt"
        save_text(load(b), t2, include="both")
        assert load(t1).labels == load(t2).labels
        np.testing.assert_allclose(load(t1).vectors, load(t2).vectors, atol=1e-6)
