import json

import numpy as np
import pytest

from checkworthy import cli
from checkworthy.bundle import load_bundle
from checkworthy.corpus import SynthConfig, generate_synthetic, load_corpus, save_corpus
from checkworthy.embeddings import EmbeddingTable, save_embeddings
from conftest import corpus_vocabulary, synthetic_embeddings


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Corpus + embeddings on disk, sized for fast CLI runs."""
    base = tmp_path_factory.mktemp("cli")
    debates = generate_synthetic(SynthConfig(n_debates=3, sentences_per=12, prevalence=0.3, seed=21))
    corpus_path = base / "corpus.jsonl"
    save_corpus(debates, corpus_path)
    table = synthetic_embeddings(corpus_vocabulary(debates), dim=12)
    vec_path = base / "en.vec"
    save_embeddings(table, vec_path)
    return {"base": base, "corpus": str(corpus_path), "vec": str(vec_path)}


def _train_args(workdir, out, seed=3):
    return [
        "train",
        "--corpus", workdir["corpus"],
        "--embeddings", workdir["vec"],
        "--out", str(out),
        "--epochs", "3",
        "--lr", "0.02",
        "--seed", str(seed),
        "--topics", "4",
        "--lda-iterations", "25",
    ]


@pytest.fixture(scope="module")
def trained_bundle(workdir):
    out = workdir["base"] / "model.bundle"
    assert cli.main(_train_args(workdir, out)) == 0
    return str(out)


class TestSynth:
    def test_writes_loadable_corpus(self, tmp_path):
        out = tmp_path / "synth.jsonl"
        code = cli.main(["synth", "--out", str(out), "--debates", "2", "--sentences", "6", "--prevalence", "0.3", "--seed", "4"])
        assert code == 0
        debates = load_corpus(out)
        assert len(debates) == 2 and len(debates[0].sentences) == 6

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        args = ["--debates", "2", "--sentences", "6", "--prevalence", "0.3", "--seed", "4"]
        cli.main(["synth", "--out", str(a), *args])
        cli.main(["synth", "--out", str(b), *args])
        assert a.read_bytes() == b.read_bytes()


class TestTrain:
    def test_bundle_written_and_loadable(self, trained_bundle):
        artifacts = load_bundle(trained_bundle)
        assert artifacts.model.w1.shape[0] == 200

    def test_identical_flags_identical_bytes(self, workdir, tmp_path):
        out1, out2 = tmp_path / "m1.bundle", tmp_path / "m2.bundle"
        assert cli.main(_train_args(workdir, out1)) == 0
        assert cli.main(_train_args(workdir, out2)) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestScore:
    def test_json_output_schema(self, trained_bundle, workdir, capsys):
        text_path = workdir["base"] / "input.txt"
        text_path.write_text("Crime fell by 50 percent. Everyone cheered loudly.", encoding="utf-8")
        code = cli.main(["score", "--model", trained_bundle, "--input", str(text_path), "--format", "json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["language"] == "English"
        assert [s["index"] for s in payload["sentences"]] == [0, 1]

    def test_sorted_output_matches_rank(self, trained_bundle, workdir, capsys):
        from checkworthy import ranking

        text_path = workdir["base"] / "input2.txt"
        text_path.write_text("One thing happened. Two things happened. Zumoko said 100 lies.", encoding="utf-8")
        cli.main(["score", "--model", trained_bundle, "--input", str(text_path), "--format", "json", "--sort", "score"])
        sorted_payload = json.loads(capsys.readouterr().out)
        cli.main(["score", "--model", trained_bundle, "--input", str(text_path), "--format", "json", "--sort", "position"])
        natural = json.loads(capsys.readouterr().out)
        scores = [s["score"] for s in natural["sentences"]]
        assert [s["index"] for s in sorted_payload["sentences"]] == ranking.rank(scores).order

    def test_stdin_input(self, trained_bundle, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO("Nothing happened today."))
        assert cli.main(["score", "--model", trained_bundle, "--input", "-", "--format", "json"]) == 0
        assert json.loads(capsys.readouterr().out)["sentences"]

    def test_text_format(self, trained_bundle, workdir, capsys):
        text_path = workdir["base"] / "input3.txt"
        text_path.write_text("Something happened.", encoding="utf-8")
        assert cli.main(["score", "--model", trained_bundle, "--input", str(text_path)]) == 0
        out = capsys.readouterr().out
        assert "language: English" in out


class TestEval:
    def test_json_schema(self, trained_bundle, workdir, capsys):
        code = cli.main([
            "eval", "--model", trained_bundle, "--corpus", workdir["corpus"],
            "--test-ids", "synth-02", "--format", "json",
        ])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload) == {"map", "r_precision", "p_at_5", "p_at_10", "p_at_20", "p_at_50"}
        assert all(0.0 <= v <= 1.0 for v in payload.values())

    def test_text_table(self, trained_bundle, workdir, capsys):
        code = cli.main(["eval", "--model", trained_bundle, "--corpus", workdir["corpus"], "--test-ids", "synth-02"])
        assert code == 0
        out = capsys.readouterr().out
        assert "map" in out and "r_precision" in out

    def test_unknown_test_id_is_runtime_error(self, trained_bundle, workdir, capsys):
        code = cli.main(["eval", "--model", trained_bundle, "--corpus", workdir["corpus"], "--test-ids", "nope"])
        assert code == 1
        assert "error" in capsys.readouterr().err


class TestAlign:
    def test_rotation_recovered_via_files(self, tmp_path, capsys):
        rng = np.random.Generator(np.random.PCG64(31))
        words = [f"w{i}" for i in range(40)]
        src_vectors = {w: rng.normal(size=8) for w in words}
        rotation, _ = np.linalg.qr(rng.normal(size=(8, 8)))
        tgt_vectors = {w: v @ rotation for w, v in src_vectors.items()}
        src, tgt = tmp_path / "src.vec", tmp_path / "tgt.vec"
        save_embeddings(EmbeddingTable(dim=8, vectors=src_vectors), src)
        save_embeddings(EmbeddingTable(dim=8, vectors=tgt_vectors), tgt)
        dict_path = tmp_path / "dict.tsv"
        dict_path.write_text("".join(f"{w}\t{w}\n" for w in words), encoding="utf-8")
        out = tmp_path / "map.bin"
        code = cli.main(["align", "--src", str(src), "--tgt", str(tgt), "--dict", str(dict_path), "--out", str(out)])
        assert code == 0
        omap = cli.load_map(out)
        assert np.abs(omap.matrix - rotation).max() < 1e-8


class TestLdaFit:
    def test_writes_artifact_and_prints_topics(self, workdir, tmp_path, capsys):
        out = tmp_path / "topics.bin"
        code = cli.main([
            "lda-fit", "--corpus", workdir["corpus"], "--k", "3",
            "--iterations", "20", "--seed", "5", "--out", str(out),
        ])
        assert code == 0
        assert out.stat().st_size > 0
        assert "topic   0:" in capsys.readouterr().out


class TestErrors:
    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["train"])  # missing required flags
        assert exc.value.code == 2

    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_model_is_runtime_error(self, capsys, tmp_path):
        text = tmp_path / "t.txt"
        text.write_text("Hello there.", encoding="utf-8")
        code = cli.main(["score", "--model", "/nonexistent.bundle", "--input", str(text)])
        assert code == 1
        assert "error" in capsys.readouterr().err
