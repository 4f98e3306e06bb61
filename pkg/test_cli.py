import json

import pytest

import main
from cli.manifest import MANIFEST_NAME, file_digest, read_manifest
from corpus.interchange import load_corpus, save_corpus
from corpus.model import Corpus
from corpus.stats import corpus_stats
from evaluation.baselines import BASELINES
from evaluation.predictions import read_predictions

TINY_SYNTHETIC = {"num_documents": 4, "tokens_per_document": 80, "mention_density": 0.2,
                  "split_anaphor_rate": 0.2, "seed": 3, "name": "tiny"}


def write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


@pytest.fixture
def corpus_file(tmp_path, small_synthetic):
    return save_corpus(small_synthetic, tmp_path / "corpus.jsonl")


@pytest.fixture
def tiny_train_config(tmp_path, corpus_file):
    return write_json(tmp_path / "tiny_train.json", {
        "main": corpus_file.name,
        "total_steps": 4,
        "seed": 2,
        "checkpoint_interval": 2,
        "stages": [{"name": "main", "strategy": "main"}],
        "model": {"embeddings": [{"kind": "trainable-lookup", "dimension": 6}], "lstm_hidden": 4,
                  "head_hidden": 5, "width_dimension": 3, "distance_dimension": 3, "ffnn_hidden": 7,
                  "ffnn_layers": 1, "dropout": 0.0, "lexical_dropout": 0.0, "train_on_all_mentions": False},
    })


def test_missing_config_is_a_usage_error(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert main.main(["train", "--config", str(missing), "--out", str(tmp_path / "out")]) == 2
    assert str(missing) in capsys.readouterr().out


def test_out_is_required(tmp_path, corpus_file):
    assert main.main(["evaluate", "--corpus", str(corpus_file), "--baseline", "recent-2"]) == 2
    assert main.main(["train", "--out", str(tmp_path)]) == 2


def test_unknown_subcommand_exits():
    with pytest.raises(SystemExit):
        main.main(["unknown"])


class TestGenSynth:
    def test_same_seed_same_file(self, tmp_path, capsys):
        config = write_json(tmp_path / "tiny.json", TINY_SYNTHETIC)
        for run in ("a", "b"):
            assert main.main(["gen-synth", "--config", str(config), "--seed", "5", "--out", str(tmp_path / run)]) == 0
        first, second = tmp_path / "a" / "tiny.jsonl", tmp_path / "b" / "tiny.jsonl"
        assert file_digest(first) == file_digest(second)
        assert read_manifest(tmp_path / "a").outputs == {"tiny.jsonl": file_digest(first)}
        assert read_manifest(tmp_path / "a").seed == 5

    def test_stats_print_the_histogram(self, tmp_path, capsys):
        config = write_json(tmp_path / "tiny.json", TINY_SYNTHETIC)
        assert main.main(["gen-synth", "--config", str(config), "--out", str(tmp_path), "--stats"]) == 0
        output = capsys.readouterr().out
        stats = corpus_stats(load_corpus(tmp_path / "tiny.jsonl"))
        assert "Antecedent counts:" in output
        for count, n in stats.antecedent_histogram.items():
            assert f"    {count}: {n}" in output

    def test_default_config_validates(self, tmp_path):
        assert main.main(["gen-synth", "--out", str(tmp_path)]) == 0
        corpus = load_corpus(tmp_path / "synthetic.jsonl")
        assert len(corpus) == 50


class TestBuildAux:
    def test_single_coref_link_count(self, tmp_path, corpus_file, small_synthetic):
        out = tmp_path / "aux"
        assert main.main(["build-aux", "--kind", "single-coref", "--corpus", str(corpus_file), "--out", str(out)]) == 0
        aux = load_corpus(out / "single-coref.jsonl", min_antecedents=1)
        assert aux.link_count() == sum(len(c) - 1 for doc in small_synthetic for c in doc.clusters)
        assert "single-coref.jsonl" in read_manifest(out).outputs

    def test_crowd_without_layer(self, tmp_path, simple_doc, capsys):
        source = save_corpus(Corpus([simple_doc]), tmp_path / "plain.jsonl")
        code = main.main(["build-aux", "--kind", "crowd", "--corpus", str(source), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "crowd" in capsys.readouterr().out

    def test_quality_against_itself(self, tmp_path, corpus_file):
        out = tmp_path / "aux"
        args = ["build-aux", "--kind", "silver", "--corpus", str(corpus_file), "--gold", str(corpus_file), "--out", str(out)]
        assert main.main(args) == 0
        quality = json.loads((out / "quality.json").read_text(encoding="utf-8"))
        assert (quality["recall"], quality["precision"], quality["f1"]) == (1.0, 1.0, 1.0)
        assert set(read_manifest(out).outputs) == {"silver.jsonl", "quality.json"}

    def test_subsample(self, tmp_path, corpus_file):
        out = tmp_path / "aux"
        args = ["build-aux", "--kind", "single-coref", "--corpus", str(corpus_file), "--subsample", "3", "--out", str(out)]
        assert main.main(args) == 0
        assert load_corpus(out / "single-coref.jsonl", min_antecedents=1).link_count() <= 3


class TestEvaluate:
    def test_baseline_bypasses_the_model(self, tmp_path, corpus_file, small_synthetic):
        out = tmp_path / "eval"
        assert main.main(["evaluate", "--corpus", str(corpus_file), "--baseline", "recent-2", "--out", str(out)]) == 0
        metrics = json.loads((out / "metrics.json").read_text(encoding="utf-8"))
        assert set(metrics["lenient"]) == {"recall", "precision", "f1"}
        assert metrics["anaphors"] == small_synthetic.anaphor_count()
        predictions = read_predictions(out / "predictions.jsonl")
        assert sum(len(p.predictions) for p in predictions) == small_synthetic.anaphor_count()
        assert set(read_manifest(out).outputs) == {"predictions.jsonl", "metrics.json", "table.txt"}

    def test_strict_only(self, tmp_path, corpus_file, capsys):
        out = tmp_path / "eval"
        args = ["evaluate", "--corpus", str(corpus_file), "--baseline", "random", "--strict-only", "--out", str(out)]
        assert main.main(args) == 0
        metrics = json.loads((out / "metrics.json").read_text(encoding="utf-8"))
        assert set(metrics) == {"strict_accuracy", "anaphors"}
        assert "Lenient" not in capsys.readouterr().out

    def test_nothing_to_evaluate(self, tmp_path, corpus_file):
        assert main.main(["evaluate", "--corpus", str(corpus_file), "--out", str(tmp_path)]) == 2

    def test_missing_corpus(self, tmp_path):
        args = ["evaluate", "--corpus", str(tmp_path / "none.jsonl"), "--baseline", "recent-2", "--out", str(tmp_path)]
        assert main.main(args) == 2


def test_stats(tmp_path, corpus_file, small_synthetic, capsys):
    assert main.main(["stats", "--corpus", str(corpus_file)]) == 0
    assert f"Split anaphors: {small_synthetic.anaphor_count()}" in capsys.readouterr().out
    assert main.main(["stats", "--corpus", str(corpus_file), "--out", str(tmp_path / "s")]) == 0
    saved = json.loads((tmp_path / "s" / "stats.json").read_text(encoding="utf-8"))
    assert saved["anaphors"] == small_synthetic.anaphor_count()


def test_train_then_evaluate_and_predict(tmp_path, tiny_train_config, corpus_file, small_synthetic):
    run = tmp_path / "run"
    assert main.main(["train", "--config", str(tiny_train_config), "--out", str(run), "--quiet"]) == 0
    assert {"checkpoint.pt", "train_log.tsv", MANIFEST_NAME} <= {p.name for p in run.iterdir()}
    manifest = read_manifest(run)
    assert manifest.command == "train"
    assert manifest.seed == 2
    assert manifest.outputs["checkpoint.pt"] == file_digest(run / "checkpoint.pt")
    stage_dir = run / "stages" / "main"
    assert read_manifest(stage_dir).outputs == {"checkpoint.pt": file_digest(stage_dir / "checkpoint.pt")}
    assert read_manifest(stage_dir).options["stage"] == "main"

    rerun = tmp_path / "rerun"
    assert main.main(["train", "--config", str(tiny_train_config), "--out", str(rerun), "--quiet"]) == 0
    assert (run / "train_log.tsv").read_bytes() == (rerun / "train_log.tsv").read_bytes()

    table = tmp_path / "table"
    args = ["evaluate", "--corpus", str(corpus_file), "--checkpoint", str(run / "checkpoint.pt"), "--table3",
            "--breakdown", "--out", str(table)]
    assert main.main(args) == 0
    metrics = json.loads((table / "metrics.json").read_text(encoding="utf-8"))
    assert set(metrics) == set(BASELINES) | {"random", "model"}
    assert "by_antecedent_count" in metrics["model"]
    assert (table / "predictions.model.jsonl").exists()

    predicted = tmp_path / "pred"
    args = ["predict", "--corpus", str(corpus_file), "--checkpoint", str(run), "--out", str(predicted)]
    assert main.main(args) == 0
    predictions = read_predictions(predicted / "predictions.jsonl")
    assert sum(len(p.predictions) for p in predictions) == small_synthetic.anaphor_count()
    assert all(2 <= len(a) <= 5 for p in predictions for a in p.predictions.values())
