"""Staged training of the split-antecedent resolver.

Each stage draws one document per optimization step from the main corpus or
from its auxiliary corpora, as decided by the stage's corpus schedule.
"""
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import torch
from torch.optim.lr_scheduler import LambdaLR
from tqdm import tqdm

from corpus.extension import extend_corpus
from corpus.interchange import load_corpus
from corpus.model import Corpus, Document, QualityTier
from encoder.embedding_providers import PrecomputedContextualProvider
from encoder.vocabulary import Vocabulary
from evaluation.predictions import predict_corpus
from evaluation.report import MetricReport, evaluate
from scorer.pair_scorer import NonFiniteScoreError
from scorer.resolver import SplitAntecedentResolver
from training.checkpoints import CheckpointManager
from training.config import DEVICE, ModelConfig, StageConfig, TrainConfig, TrainConfigError
from training.schedules import CorpusChoice, CorpusSchedule, DocumentSampler
from training.strategy import Strategy

logger = logging.getLogger(__name__)

LOG_NAME = "train_log.tsv"
LOG_HEADER = "step\tstage\tcorpus\tloss\n"


class TrainingDivergedError(RuntimeError):
    def __init__(self, stage: str, step: int, reason: str):
        self.stage = stage
        self.step = step
        super().__init__(f"Training diverged in stage '{stage}' at step {step}: {reason}")


@dataclass
class StageResult:
    name: str
    strategy: str
    steps: int
    main_steps: int = 0
    aux_steps: int = 0
    mean_loss: float = 0.0
    checkpoint: Optional[Path] = None


@dataclass
class TrainResult:
    out_dir: Path
    checkpoint: Path
    log_path: Path
    config_hash: str
    stages: List[StageResult] = field(default_factory=list)
    dev_report: Optional[MetricReport] = None


class Trainer:
    """Runs the stages of a TrainConfig and writes checkpoints and a TSV log into out_dir.

    ``corpora`` maps config paths to already-loaded corpora and bypasses
    reading those paths from disk.
    """

    def __init__(self, config: TrainConfig, out_dir: Union[str, Path], show_progress: bool = True,
                 corpora: Optional[Dict[str, Corpus]] = None):
        self.config = config
        self.out_dir = Path(out_dir)
        self.show_progress = show_progress
        self.corpora = dict(corpora or {})
        self.device = torch.device(DEVICE)

        self.main = self._load(config.main, min_antecedents=2, tier=QualityTier.GOLD)
        self.aux: Dict[str, Corpus] = {}
        for stage in config.stages:
            for path in stage.aux:
                if path not in self.aux:
                    self.aux[path] = self._load(path, min_antecedents=1, tier=QualityTier.SILVER)
                    if not len(self.aux[path]):
                        raise TrainConfigError(f"Auxiliary corpus '{path}' of stage '{stage.name}' is empty")
        self.dev = self._load(config.dev, min_antecedents=2, tier=QualityTier.GOLD) if config.dev else None

        self.train_main = extend_corpus(self.main) if config.extend_main_anaphors else self.main
        self.vocabulary = Vocabulary.from_corpora([self.train_main, *self.aux.values()])
        self.model_config = self._resolved_model_config(config.model)

    def _load(self, path: str, min_antecedents: int, tier: QualityTier) -> Corpus:
        if path in self.corpora:
            return self.corpora[path]
        resolved = self.config.resolve(path)
        if not resolved.exists():
            raise FileNotFoundError(f"Corpus not found: {resolved}")
        return load_corpus(resolved, quality_tier=tier, min_antecedents=min_antecedents)

    def _resolved_model_config(self, model_config: ModelConfig) -> ModelConfig:
        embeddings = []
        for spec in model_config.embeddings:
            spec = dict(spec)
            if "path" in spec:
                spec["path"] = str(self.config.resolve(spec["path"]))
            embeddings.append(spec)
        return replace(model_config, embeddings=embeddings)

    def build_model(self) -> SplitAntecedentResolver:
        model = SplitAntecedentResolver.from_config(self.model_config, self.vocabulary)
        for provider in model.encoder.providers:
            if isinstance(provider, PrecomputedContextualProvider):
                for corpus in [self.train_main, *self.aux.values()] + ([self.dev] if self.dev else []):
                    provider.check_coverage(corpus)
        return model.to(self.device)

    def _optimizer(self, model: SplitAntecedentResolver) -> torch.optim.Optimizer:
        return torch.optim.Adam(model.parameters(), lr=self.config.optimizer.learning_rate)

    def _lr_schedule(self, optimizer: torch.optim.Optimizer, steps: int) -> LambdaLR:
        ratio = self.config.optimizer.final_learning_rate_ratio
        return LambdaLR(optimizer, lambda s: 1.0 - (1.0 - ratio) * min(s, steps) / max(steps, 1))

    def _samplers(self, stage: StageConfig, rng: np.random.Generator) -> Dict[CorpusChoice, DocumentSampler]:
        samplers = {}
        if stage.uses_main:
            samplers[CorpusChoice.MAIN] = DocumentSampler(self.train_main.documents, rng)
        aux_docs: List[Document] = [doc for path in stage.aux for doc in self.aux[path]]
        if aux_docs:
            samplers[CorpusChoice.AUX] = DocumentSampler(aux_docs, rng)
        return samplers

    def _step(self, model, optimizer, doc: Document, stage: str, step: int) -> float:
        model.train()
        optimizer.zero_grad()
        try:
            loss, count = model.document_loss(doc)
        except NonFiniteScoreError as e:
            raise TrainingDivergedError(stage, step, str(e)) from e
        if not torch.isfinite(loss):
            raise TrainingDivergedError(stage, step, f"loss is {loss.item()}")
        if count:
            loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), self.config.optimizer.max_grad_norm)
            optimizer.step()
        return float(loss.item())

    def run(self) -> TrainResult:
        config = self.config
        torch.manual_seed(config.seed)
        rng = np.random.default_rng(config.seed)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        log_path = self.out_dir / LOG_NAME
        final = CheckpointManager(self.out_dir)

        model = self.build_model()
        logger.info("Training on %s: %d documents, %d split anaphors (%d before extension)",
                    self.main.name, len(self.train_main), self.train_main.anaphor_count(),
                    self.main.anaphor_count())

        results, optimizer = [], None
        with open(log_path, "w", encoding="utf-8", newline="\n") as log:
            log.write(LOG_HEADER)
            for stage, steps in zip(config.stages, config.stage_steps()):
                if optimizer is None or config.reset_optimizer:
                    optimizer = self._optimizer(model)
                results.append(self._run_stage(model, optimizer, stage, steps, rng, log))
        final.save(model, self.model_config, self.vocabulary, config.config_hash,
                   stage=config.stages[-1].name, step=sum(config.stage_steps()), optimizer=optimizer)

        dev_report = None
        if self.dev is not None:
            dev_report = evaluate(predict_corpus(model, self.dev), self.dev)
            logger.info("Dev lenient F1 %.1f, strict accuracy %.1f", dev_report.lenient_f1, dev_report.strict_accuracy)

        return TrainResult(out_dir=self.out_dir, checkpoint=final.path, log_path=log_path,
                           config_hash=config.config_hash, stages=results, dev_report=dev_report)

    def _run_stage(self, model, optimizer, stage: StageConfig, steps: int, rng: np.random.Generator, log) -> StageResult:
        result = StageResult(name=stage.name, strategy=stage.strategy.value, steps=steps)
        if steps == 0:
            logger.warning("Stage '%s' has no steps; skipping", stage.name)
            return result

        samplers = self._samplers(stage, rng)
        schedule = CorpusSchedule(stage.strategy, steps, stage.name, rng,
                                  has_aux=CorpusChoice.AUX in samplers, alternate=stage.alternate)
        lr_schedule = self._lr_schedule(optimizer, steps)
        periodic = CheckpointManager(self.out_dir / "stages" / stage.name)
        logger.info("Stage '%s' (%s): %d steps", stage.name, stage.strategy.value, steps)

        total_loss = 0.0
        progress = tqdm(range(1, steps + 1), desc=stage.name, disable=not self.show_progress)
        for step in progress:
            choice, _ = schedule.next(step)
            loss = self._step(model, optimizer, samplers[choice].next(), stage.name, step)
            lr_schedule.step()
            total_loss += loss
            if choice == CorpusChoice.MAIN:
                result.main_steps += 1
            else:
                result.aux_steps += 1
            if step % self.config.log_interval == 0 or step == steps:
                log.write(f"{step}\t{stage.name}\t{choice.value}\t{loss:.6f}\n")
                progress.set_postfix(loss=f"{loss:.4f}")
            if step % self.config.checkpoint_interval == 0:
                periodic.save(model, self.model_config, self.vocabulary, self.config.config_hash,
                              stage=stage.name, step=step, optimizer=optimizer)

        result.checkpoint = periodic.save(model, self.model_config, self.vocabulary, self.config.config_hash,
                                          stage=stage.name, step=steps, optimizer=optimizer)
        result.mean_loss = total_loss / steps
        logger.info("Stage '%s' done: %d main / %d aux steps, mean loss %.4f",
                    stage.name, result.main_steps, result.aux_steps, result.mean_loss)
        return result


def train(config: TrainConfig, out_dir: Union[str, Path], show_progress: bool = True,
          corpora: Optional[Dict[str, Corpus]] = None) -> TrainResult:
    return Trainer(config, out_dir, show_progress=show_progress, corpora=corpora).run()


def pretrain_finetune(config: TrainConfig, out_dir: Union[str, Path], show_progress: bool = True,
                      corpora: Optional[Dict[str, Corpus]] = None) -> TrainResult:
    """Two-stage run: auxiliary-only pre-training, then main-only fine-tuning."""
    strategies = [s.strategy for s in config.stages]
    if strategies != [Strategy.PRETRAIN, Strategy.MAIN]:
        raise TrainConfigError(
            f"pretrain_finetune needs stages [pretrain, main], got {[s.value for s in strategies]}"
        )
    return train(config, out_dir, show_progress=show_progress, corpora=corpora)
