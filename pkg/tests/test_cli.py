"""End-to-end command-line behaviour and exit codes."""

import numpy as np
import pytest

import senseforge as sf
from senseforge.cli import _default_workers, build_parser, run
from senseforge.store import load, save_text

from helpers import exact_analogy_model, write_analogy_file


@pytest.fixture(scope="module")
def corpus_file(tmp_path_factory):
    """Small two-topic corpus on disk."""
    from senseforge.synthetic import two_topic_corpus

    sentences, _, _ = two_topic_corpus(sentences_per_topic=400, seed=3)
    path = tmp_path_factory.mktemp("corpus") / "c.txt"
    path.write_text("\n".join(" ".join(s) for s in sentences) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def tagged_corpus_file(tmp_path_factory):
    sentences = [["livro|N", "bom|ADJ", "caro|ADJ"], ["livro|V", "bom|ADJ", "já|ADV"]] * 50
    path = tmp_path_factory.mktemp("corpus") / "tagged.txt"
    path.write_text("\n".join(" ".join(s) for s in sentences) + "\n", encoding="utf-8")
    return path


TRAIN_FAST = ["--dim", "16", "--min-count", "1", "--epochs", "1", "--seed", "5"]


class TestExitCodes:
    def test_no_command_is_usage_error(self, capsys):
        assert run([]) == 1

    def test_unknown_flag_is_usage_error(self, capsys):
        assert run(["train", "--nope"]) == 1
        assert "usage" in capsys.readouterr().err

    def test_bad_flag_value_is_usage_error(self, corpus_file, tmp_path, capsys):
        code = run(["train", "--input", str(corpus_file), "--output",
                    str(tmp_path / "m.bin"), "--dim", "0"])
        assert code == 1

    def test_missing_input_is_data_error(self, tmp_path, capsys):
        code = run(["train", "--input", str(tmp_path / "absent.txt"),
                    "--output", str(tmp_path / "m.bin")] + TRAIN_FAST)
        assert code == 2

    def test_sense2vec_on_untagged_corpus_is_data_error(self, corpus_file, tmp_path, capsys):
        code = run(["train", "--mode", "sense2vec", "--input", str(corpus_file),
                    "--output", str(tmp_path / "m.bin")] + TRAIN_FAST)
        assert code == 2
        assert "malformed tagged token" in capsys.readouterr().err

    def test_help_exits_zero(self):
        assert run(["--help"]) == 0


class TestTrain:
    def test_mssg_end_to_end(self, corpus_file, tmp_path, capsys):
        out = tmp_path / "m.bin"
        code = run(["train", "--mode", "mssg", "--input", str(corpus_file),
                    "--output", str(out), "--senses", "2"] + TRAIN_FAST)
        assert code == 0
        assert out.exists()
        assert "tokens=" in capsys.readouterr().out
        wv = load(out)
        assert wv.kind == "mssg"
        assert wv.sense_rows["banco"]

    def test_summary_line_format(self, corpus_file, tmp_path, capsys):
        run(["train", "--input", str(corpus_file), "--output",
             str(tmp_path / "m.bin")] + TRAIN_FAST)
        summary = [l for l in capsys.readouterr().out.splitlines() if "tokens=" in l][0]
        assert "time=" in summary and "tok/s=" in summary

    def test_text_output_by_extension(self, corpus_file, tmp_path):
        out = tmp_path / "m.txt"
        assert run(["train", "--input", str(corpus_file), "--output", str(out)]
                   + TRAIN_FAST) == 0
        header = out.read_text(encoding="utf-8").splitlines()[0]
        assert len(header.split()) == 2

    def test_byte_identical_artifacts_for_same_seed(self, corpus_file, tmp_path):
        a, b = tmp_path / "a.bin", tmp_path / "b.bin"
        argv = ["train", "--input", str(corpus_file), "--workers", "1"] + TRAIN_FAST
        assert run(argv + ["--output", str(a)]) == 0
        assert run(argv + ["--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_sense2vec_trains_tagged_rows(self, tagged_corpus_file, tmp_path):
        out = tmp_path / "m.bin"
        code = run(["train", "--mode", "sense2vec", "--input", str(tagged_corpus_file),
                    "--output", str(out)] + TRAIN_FAST)
        assert code == 0
        wv = load(out)
        assert wv.kind == "tagged"
        assert "livro|N" in wv.index and "livro|V" in wv.index


class TestEval:
    def test_oracle_dataset_reports_full_accuracy(self, tmp_path, capsys):
        wv, quads = exact_analogy_model(4)
        model_path = tmp_path / "m.txt"
        save_text(wv, model_path)
        data_path = write_analogy_file(tmp_path / "a.txt", [
            ("family", quads[:2]), ("opposite", quads[2:]),
        ])
        code = run(["eval", "--model", str(model_path), "--analogies", str(data_path),
                    "--machine"])
        assert code == 0
        out = capsys.readouterr().out
        assert "100.00%" in out
        assert "all\taggregate\t4\t4\t0\t1.0000" in out

    def test_parse_error_exit_code(self, tmp_path, capsys):
        wv, _ = exact_analogy_model(1)
        model_path = tmp_path / "m.txt"
        save_text(wv, model_path)
        bad = tmp_path / "bad.txt"
        bad.write_text(": family\nrei rainha\n", encoding="utf-8")
        assert run(["eval", "--model", str(model_path), "--analogies", str(bad)]) == 2


@pytest.fixture(scope="module")
def model_file(tmp_path_factory):
    rng = np.random.default_rng(8)
    labels = ["banco", "dinheiro", "madeira", "dados", "juros",
              "banco#0", "banco#1"]
    wv = sf.WordVectors(labels, rng.normal(size=(7, 6)).astype(np.float32))
    path = tmp_path_factory.mktemp("m") / "m.txt"
    save_text(wv, path)
    return path


class TestQueries:

    def test_nn_output(self, model_file, capsys):
        assert run(["nn", "--model", str(model_file), "--query", "banco",
                    "--topn", "2"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        label, score = lines[0].split("\t")
        float(score)

    def test_nn_oov_is_data_error(self, model_file, capsys):
        assert run(["nn", "--model", str(model_file), "--query", "zzz"]) == 2

    def test_algebra(self, model_file, capsys):
        assert run(["algebra", "--model", str(model_file),
                    "--expr", "banco + dinheiro - madeira"]) == 0
        assert capsys.readouterr().out.strip()

    def test_algebra_cancellation_warns(self, model_file, capsys):
        assert run(["algebra", "--model", str(model_file), "--expr", "banco - banco"]) == 0
        captured = capsys.readouterr()
        assert captured.out.strip() == ""
        assert "zero" in captured.err

    def test_algebra_sense_space(self, model_file, capsys):
        assert run(["algebra", "--model", str(model_file), "--expr", "banco#0 + banco#1",
                    "--space", "sense"]) == 0


class TestVocabAndConvert:
    def test_vocab_stdout(self, corpus_file, capsys):
        assert run(["vocab", "--input", str(corpus_file), "--min-count", "1"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        token, count = lines[0].split("\t")
        assert int(count) >= 1

    def test_vocab_file_output(self, corpus_file, tmp_path, capsys):
        out = tmp_path / "v.tsv"
        assert run(["vocab", "--input", str(corpus_file), "--min-count", "1",
                    "--output", str(out)]) == 0
        loaded = sf.Vocabulary.load(out)
        assert "banco" in loaded

    def test_convert_round_trip(self, corpus_file, tmp_path, capsys):
        model = tmp_path / "m.bin"
        run(["train", "--input", str(corpus_file), "--output", str(model)] + TRAIN_FAST)
        text = tmp_path / "m.txt"
        assert run(["convert", "--input", str(model), "--to", "text",
                    "--output", str(text)]) == 0
        back = tmp_path / "m2.bin"
        assert run(["convert", "--input", str(text), "--to", "binary",
                    "--output", str(back)]) == 0
        np.testing.assert_allclose(load(model).vectors, load(back).vectors, atol=1e-5)


class TestDefaults:
    def test_training_defaults_match_reference_setup(self):
        args = build_parser().parse_args(["train", "--input", "x", "--output", "y"])
        assert (args.dim, args.window, args.lr, args.min_count, args.senses) == (
            300, 5, 0.025, 10, 3,
        )

    def test_workers_env_fallback(self, monkeypatch):
        monkeypatch.setenv("SENSEFORGE_THREADS", "4")
        assert _default_workers() == 4
        monkeypatch.setenv("SENSEFORGE_THREADS", "junk")
        assert _default_workers() == 1
        monkeypatch.delenv("SENSEFORGE_THREADS")
        assert _default_workers() == 1

    def test_console_script_installed(self):
        import shutil
        import subprocess

        exe = shutil.which("senseforge")
        if exe is None:
            pytest.skip("console script not on PATH")
        proc = subprocess.run([exe, "--help"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert "train" in proc.stdout
