import json

import numpy as np
import pytest
import torch

from auxiliary.builders import build_silver, build_single_coref
from corpus.model import Corpus, Document
from corpus.synthetic import SyntheticConfig, generate_synthetic
from evaluation.predictions import predict_corpus
from evaluation.report import evaluate
from scorer.resolver import SplitAntecedentResolver
from training.checkpoints import CheckpointError, read_checkpoint, restore_model
from training.config import ModelConfig, OptimizerConfig, StageConfig, TrainConfig, TrainConfigError
from training.config_loader import CONFIG_DIR, ConfigLoader
from training.experiments import STRATEGY_STAGES, compare_strategies, format_rows, strategy_config, StrategyRow
from training.schedules import CorpusChoice, CorpusSchedule, DocumentSampler, annealing_p_main
from training.strategy import Strategy
from training.trainer import LOG_HEADER, LOG_NAME, Trainer, TrainingDivergedError, pretrain_finetune, train

TINY_MODEL = ModelConfig(
    embeddings=[{"kind": "trainable-lookup", "dimension": 6}],
    lstm_hidden=4, head_hidden=5, width_dimension=3, distance_dimension=3,
    ffnn_hidden=7, ffnn_layers=1, dropout=0.0, lexical_dropout=0.0, train_on_all_mentions=False,
)


def tiny_config(stages, total_steps, **overrides):
    values = dict(main="main", stages=stages, total_steps=total_steps, seed=1, checkpoint_interval=4,
                  model=TINY_MODEL, optimizer=OptimizerConfig(learning_rate=0.01))
    values.update(overrides)
    return TrainConfig(**values)


def state_of(path):
    return read_checkpoint(path)["model_state"]


def same_state(first, second):
    return first.keys() == second.keys() and all(torch.equal(first[k], second[k]) for k in first)


@pytest.fixture
def corpora(small_synthetic):
    return {"main": small_synthetic, "aux": build_single_coref(small_synthetic).corpus}


class TestSchedules:
    @pytest.mark.parametrize("t, expected", [(0, 0.0), (1000, 1.0), (500, 0.5), (2000, 1.0), (-3, 0.0)])
    def test_annealing_ramp(self, t, expected):
        assert annealing_p_main(t, 1000) == expected

    def test_concat_draws_half_main(self):
        schedule = CorpusSchedule(Strategy.CONCAT, 10_000, "mix", np.random.default_rng(0))
        choices = [schedule.next(step)[0] for step in range(1, 10_001)]
        assert abs(choices.count(CorpusChoice.MAIN) / len(choices) - 0.5) <= 0.02

    def test_annealing_follows_the_ramp(self):
        total = 100_000
        schedule = CorpusSchedule(Strategy.ANNEALING, total, "anneal", np.random.default_rng(0))
        main = np.array([schedule.next(step)[0] == CorpusChoice.MAIN for step in range(1, total + 1)])
        for decile, chunk in enumerate(np.split(main, 10)):
            expected = (decile + 0.5) / 10
            assert abs(chunk.mean() - expected) <= 0.03, decile
        assert main[-1]

    def test_same_seed_same_sequence(self):
        def sequence(seed):
            schedule = CorpusSchedule(Strategy.ANNEALING, 500, "anneal", np.random.default_rng(seed))
            return [schedule.next(step)[0] for step in range(1, 501)]
        assert sequence(7) == sequence(7)
        assert sequence(7) != sequence(8)

    def test_fixed_strategies(self):
        rng = np.random.default_rng(0)
        pretrain = CorpusSchedule(Strategy.PRETRAIN, 10, "pre", rng)
        plain = CorpusSchedule(Strategy.MAIN, 10, "main", rng)
        no_aux = CorpusSchedule(Strategy.CONCAT, 10, "concat", rng, has_aux=False)
        for step in range(1, 11):
            assert pretrain.next(step)[0] == CorpusChoice.AUX
            assert plain.next(step)[0] == CorpusChoice.MAIN
            assert no_aux.next(step)[0] == CorpusChoice.MAIN

    def test_alternating_concat(self):
        schedule = CorpusSchedule(Strategy.CONCAT, 6, "alt", np.random.default_rng(0), alternate=True)
        assert [schedule.next(s)[0].value for s in range(1, 7)] == ["main", "aux"] * 3

    def test_state_reports_the_ratio(self):
        schedule = CorpusSchedule(Strategy.ANNEALING, 4, "anneal", np.random.default_rng(0))
        _, state = schedule.next(2)
        assert (state.step, state.total, state.stage, state.p_main) == (2, 4, "anneal", 0.5)

    def test_document_sampler_visits_every_item_per_epoch(self):
        sampler = DocumentSampler(list("abcde"), np.random.default_rng(3))
        first = [sampler.next() for _ in range(5)]
        second = [sampler.next() for _ in range(5)]
        assert sorted(first) == sorted(second) == list("abcde")
        assert sampler.epoch == 2
        with pytest.raises(ValueError):
            DocumentSampler([], np.random.default_rng(0))


class TestConfig:
    def test_open_stages_split_the_remainder(self):
        stages = [StageConfig("pre", Strategy.PRETRAIN, aux=["x"]), StageConfig("main", Strategy.MAIN)]
        assert tiny_config(stages, 10).stage_steps() == [5, 5]
        assert tiny_config(stages, 11).stage_steps() == [5, 6]
        stages[0].steps = 3
        assert tiny_config(stages, 10).stage_steps() == [3, 7]

    @pytest.mark.parametrize("stages, total, message", [
        ([], 10, "At least one"),
        ([StageConfig("pre", Strategy.PRETRAIN)], 10, "needs auxiliary"),
        ([StageConfig("m", Strategy.MAIN, aux=["x"])], 10, "lists auxiliary"),
        ([StageConfig("pre", Strategy.PRETRAIN, aux=["x"])], 10, "final stage"),
        ([StageConfig("a", Strategy.MAIN), StageConfig("b", Strategy.MAIN)], 10, "offending stages"),
        ([StageConfig("m", Strategy.MAIN, steps=4)], 10, "sum to 4"),
        ([StageConfig("m", Strategy.MAIN)], 0, "positive number"),
    ])
    def test_invalid_stage_layouts(self, stages, total, message):
        with pytest.raises(TrainConfigError, match=message):
            tiny_config(stages, total).validate()

    def test_from_dict_errors(self):
        with pytest.raises(TrainConfigError, match="missing 'stages'"):
            TrainConfig.from_dict({"main": "m.jsonl"})
        with pytest.raises(TrainConfigError, match="Available"):
            TrainConfig.from_dict({"main": "m.jsonl", "stages": [{"name": "s", "strategy": "mixup"}]})
        with pytest.raises(TrainConfigError, match="Unknown keys in model"):
            TrainConfig.from_dict({"main": "m.jsonl", "stages": [{"name": "s", "strategy": "main"}],
                                   "model": {"layers": 3}})

    def test_hash_tracks_content(self, tmp_path):
        data = {"main": "m.jsonl", "stages": [{"name": "s", "strategy": "main"}], "total_steps": 5}
        first = TrainConfig.from_dict(data, base_dir=tmp_path)
        assert first.config_hash == TrainConfig.from_dict(data, base_dir=tmp_path).config_hash
        assert first.config_hash != TrainConfig.from_dict({**data, "seed": 9}, base_dir=tmp_path).config_hash
        assert first.to_dict()["main"] == str(tmp_path / "m.jsonl")


class TestConfigLoader:
    def test_shipped_configs_load(self):
        loader = ConfigLoader()
        assert {"full_scale", "synthetic_overfit", "synthetic_corpus"} <= set(loader.list_configs())

        defaults = loader.load_train_config("full_scale")
        assert [s.strategy for s in defaults.stages] == [Strategy.PRETRAIN, Strategy.ANNEALING]
        assert defaults.stage_steps() == [100_000, 100_000]
        assert defaults.resolve(defaults.main) == CONFIG_DIR / "../../data/main_train.jsonl"
        assert defaults.model == ModelConfig()

        synthetic = loader.load_synthetic_config("synthetic_corpus")
        assert synthetic == SyntheticConfig()

    def test_unknown_name(self):
        with pytest.raises(TrainConfigError, match="Available"):
            ConfigLoader().load_train_config("no_such_config")

    def test_missing_file_names_the_path(self, tmp_path):
        path = tmp_path / "missing.json"
        with pytest.raises(FileNotFoundError, match="missing.json"):
            ConfigLoader().load_train_config(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(TrainConfigError, match="Error parsing"):
            ConfigLoader().load_train_config(path)

    def test_descriptions(self):
        info = ConfigLoader().get_config_info()
        assert info["synthetic_corpus"].startswith("Generator defaults")


class TestCheckpoints:
    def test_wrong_version(self, tmp_path):
        torch.save({"format_version": 99}, tmp_path / "checkpoint.pt")
        with pytest.raises(CheckpointError, match="version"):
            read_checkpoint(tmp_path)

    def test_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            restore_model(tmp_path / "nothing.pt")


class TestTrainer:
    def test_short_run_writes_log_and_checkpoints(self, tmp_path, corpora):
        config = tiny_config([StageConfig("main", Strategy.MAIN)], 6)
        result = train(config, tmp_path / "run", show_progress=False, corpora=corpora)

        lines = result.log_path.read_text(encoding="utf-8").splitlines(keepends=True)
        assert result.log_path.name == LOG_NAME
        assert lines[0] == LOG_HEADER
        assert [line.split("\t")[:3] for line in lines[1:]] == [[str(s), "main", "main"] for s in range(1, 7)]
        assert (tmp_path / "run" / "stages" / "main" / "checkpoint.pt").exists()
        assert result.checkpoint == tmp_path / "run" / "checkpoint.pt"
        assert result.stages[0].main_steps == 6

        archive = read_checkpoint(result.checkpoint)
        assert (archive["stage"], archive["step"], archive["config_hash"]) == ("main", 6, config.config_hash)
        model, model_config, _, _ = restore_model(result.checkpoint)
        assert model_config == TINY_MODEL
        assert same_state(model.state_dict(), archive["model_state"])

    def test_rerun_is_byte_identical(self, tmp_path, corpora):
        config = tiny_config([StageConfig("main", Strategy.MAIN)], 5)
        first = train(config, tmp_path / "a", show_progress=False, corpora=corpora)
        second = train(config, tmp_path / "b", show_progress=False, corpora=corpora)
        assert first.log_path.read_bytes() == second.log_path.read_bytes()
        assert same_state(state_of(first.checkpoint), state_of(second.checkpoint))

    def test_stage_step_counters_restart(self, tmp_path, corpora):
        stages = [StageConfig("pre", Strategy.PRETRAIN, aux=["aux"], steps=3),
                  StageConfig("anneal", Strategy.ANNEALING, aux=["aux"], steps=4)]
        result = train(tiny_config(stages, 7), tmp_path, show_progress=False, corpora=corpora)
        rows = [line.rstrip("\n").split("\t") for line in result.log_path.read_text(encoding="utf-8").splitlines()[1:]]
        assert [(r[0], r[1]) for r in rows] == [("1", "pre"), ("2", "pre"), ("3", "pre"),
                                                ("1", "anneal"), ("2", "anneal"), ("3", "anneal"), ("4", "anneal")]
        assert all(r[2] == "aux" for r in rows[:3])
        assert rows[-1][2] == "main"
        assert [s.aux_steps for s in result.stages][0] == 3

    def test_zero_step_finetune_keeps_pretrained_weights(self, tmp_path, corpora):
        stages = [StageConfig("pretrain", Strategy.PRETRAIN, aux=["aux"], steps=4),
                  StageConfig("finetune", Strategy.MAIN, steps=0)]
        result = pretrain_finetune(tiny_config(stages, 4), tmp_path, show_progress=False, corpora=corpora)
        assert result.stages[1].checkpoint is None
        assert same_state(state_of(result.checkpoint), state_of(tmp_path / "stages" / "pretrain" / "checkpoint.pt"))

    def test_pretrain_finetune_needs_two_stages(self, tmp_path, corpora):
        with pytest.raises(TrainConfigError, match="pretrain_finetune"):
            pretrain_finetune(tiny_config([StageConfig("main", Strategy.MAIN)], 2), tmp_path, corpora=corpora)

    def test_empty_aux_corpus(self, tmp_path, corpora):
        stages = [StageConfig("mix", Strategy.CONCAT, aux=["aux"])]
        with pytest.raises(TrainConfigError, match="empty"):
            Trainer(tiny_config(stages, 2), tmp_path, corpora={**corpora, "aux": Corpus([])})

    def test_missing_corpus_file(self, tmp_path):
        config = tiny_config([StageConfig("main", Strategy.MAIN)], 2, main="absent.jsonl", base_dir=tmp_path)
        with pytest.raises(FileNotFoundError, match="absent.jsonl"):
            Trainer(config, tmp_path / "out")

    def test_main_anaphors_are_extended(self, tmp_path, corpora):
        trainer = Trainer(tiny_config([StageConfig("main", Strategy.MAIN)], 2), tmp_path, corpora=corpora)
        assert trainer.train_main.anaphor_count() >= trainer.main.anaphor_count()
        plain = Trainer(tiny_config([StageConfig("main", Strategy.MAIN)], 2, extend_main_anaphors=False),
                        tmp_path, corpora=corpora)
        assert plain.train_main is plain.main

    def test_divergence_is_reported(self, tmp_path, corpora, monkeypatch):
        def broken_loss(self, doc):
            return torch.tensor(float("nan"), requires_grad=True), 1

        monkeypatch.setattr(SplitAntecedentResolver, "document_loss", broken_loss)
        with pytest.raises(TrainingDivergedError) as info:
            train(tiny_config([StageConfig("main", Strategy.MAIN)], 3), tmp_path, show_progress=False, corpora=corpora)
        assert (info.value.stage, info.value.step) == ("main", 1)

    def test_dev_report(self, tmp_path, corpora, small_synthetic):
        config = tiny_config([StageConfig("main", Strategy.MAIN)], 2, dev="dev")
        result = train(config, tmp_path, show_progress=False, corpora={**corpora, "dev": small_synthetic})
        assert result.dev_report.anaphors == small_synthetic.anaphor_count()

    def test_documents_without_mentions_are_skipped(self, tmp_path, corpora, small_synthetic):
        empty = Document(doc_id="empty", tokens=["Nothing", "here", "."], mentions=[], clusters=[])
        main = Corpus(small_synthetic.documents + [empty], name="with-empty")
        config = tiny_config([StageConfig("main", Strategy.MAIN)], len(main) + 1, dev="dev", extend_main_anaphors=False)
        result = train(config, tmp_path, show_progress=False, corpora={**corpora, "main": main, "dev": main})
        assert result.stages[0].main_steps == len(main) + 1
        assert result.dev_report.anaphors == small_synthetic.anaphor_count()


class TestExperiments:
    def test_strategy_configs(self):
        base = tiny_config([StageConfig("main", Strategy.MAIN)], 10)
        for name in STRATEGY_STAGES:
            config = strategy_config(base, name, 10)
            assert sum(config.stage_steps()) == 10
            assert config.stages[-1].uses_main
        assert [s.steps for s in strategy_config(base, "pretrain", 9).stages] == [4, 5]
        with pytest.raises(ValueError, match="Available"):
            strategy_config(base, "curriculum", 10)

    def test_format_rows(self):
        rows = [StrategyRow("no-aux", 40.0, 10.0, 5), StrategyRow("annealing", 42.5, 12.0, 5)]
        table = format_rows(rows).splitlines()
        assert table[1].split()[-1] == "10.0"
        assert table[2].split()[-1] == "+2.5"


@pytest.mark.slow
def test_compare_strategies_runs_every_strategy(tmp_path, corpora, small_synthetic):
    base = tiny_config([StageConfig("main", Strategy.MAIN)], 10)
    rows = compare_strategies(corpora["main"], corpora["aux"], small_synthetic, base, tmp_path, steps=10)
    assert [r.strategy for r in rows] == list(STRATEGY_STAGES)
    assert all(0.0 <= r.lenient_f1 <= 100.0 and r.steps == 10 for r in rows)
    assert all((tmp_path / name / "checkpoint.pt").exists() for name in STRATEGY_STAGES)


@pytest.mark.slow
def test_auxiliary_strategies_beat_main_only(tmp_path):
    base = ConfigLoader().load_train_config("synthetic_overfit")
    main = generate_synthetic(SyntheticConfig(num_documents=7, seed=41, name="main"))
    aux = build_silver(generate_synthetic(SyntheticConfig(num_documents=70, seed=42, name="aux"))).corpus
    dev = generate_synthetic(SyntheticConfig(num_documents=20, seed=43, name="dev"))

    rows = compare_strategies(main, aux, dev, base, tmp_path, steps=400)
    f1 = {r.strategy: r.lenient_f1 for r in rows}
    for strategy in ("concat", "pretrain", "annealing"):
        assert f1[strategy] >= f1["no-aux"] + 2.0, format_rows(rows)


@pytest.mark.slow
def test_overfits_a_small_synthetic_corpus(tmp_path):
    config = ConfigLoader().load_train_config("synthetic_overfit")
    corpus = generate_synthetic(SyntheticConfig(num_documents=50, seed=21))
    result = train(config, tmp_path, show_progress=False, corpora={config.main: corpus})

    model, _, _, _ = restore_model(result.checkpoint)
    report = evaluate(predict_corpus(model, corpus), corpus)
    assert report.lenient_f1 >= 95.0
    assert report.strict_accuracy >= 80.0
    assert json.loads(report.to_json())["anaphors"] == corpus.anaphor_count()
